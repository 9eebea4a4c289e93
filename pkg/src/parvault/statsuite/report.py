"""Plain-text and CSV emitters for battery and pixel-statistics output.

One record per randomness test (name, p-value or p-values, verdict,
parameters), a two-column histogram CSV, and the correlation table laid
out as image, direction, original coefficient, encrypted coefficient.
Everything returns a string; callers decide where it lands.
"""


def _fmt_p(p):
    if isinstance(p, (list, tuple)):
        return "[" + ", ".join(f"{v:.6f}" for v in p) + "]"
    return f"{p:.6f}"


def battery_report_text(results, alpha=0.01):
    lines = [f"randomness battery, alpha={alpha}", ""]
    width = max(len(r.name) for r in results)
    for r in results:
        if r.status == "skipped":
            verdict = "SKIP"
            detail = r.note
        else:
            verdict = "pass" if r.passed else "FAIL"
            detail = f"p={_fmt_p(r.p_value)}"
        params = ""
        if r.stats:
            params = "  (" + ", ".join(f"{k}={v}" for k, v in
                                       sorted(r.stats.items())) + ")"
        lines.append(f"{r.name:<{width}}  {verdict:<4}  {detail}{params}")
    ran = [r for r in results if r.status == "ok"]
    passed = sum(1 for r in ran if r.passed)
    lines.append("")
    lines.append(f"{passed}/{len(ran)} ran tests passed, "
                 f"{len(results) - len(ran)} skipped")
    return "\n".join(lines) + "\n"


def histogram_csv(counts):
    lines = ["value,count"]
    lines.extend(f"{i},{int(c)}" for i, c in enumerate(counts))
    return "\n".join(lines) + "\n"


def correlation_csv(rows):
    """rows: iterables of (image, direction, original, encrypted)."""
    lines = ["image,direction,original,encrypted"]
    for image, direction, orig, enc in rows:
        lines.append(f"{image},{direction},{orig:.6f},{enc:.6f}")
    return "\n".join(lines) + "\n"


def bench_csv(rows):
    """rows: iterables of (attribute_count, encrypt_ms, decrypt_ms)."""
    lines = ["attributes,encrypt_ms,decrypt_ms"]
    for count, enc_ms, dec_ms in rows:
        lines.append(f"{count},{enc_ms:.3f},{dec_ms:.3f}")
    return "\n".join(lines) + "\n"
