"""Command-line front end.

Wires every module into subcommands: key generation, standalone
encrypt/decrypt, the vault workflow (share, access, revoke) backed by a
replayable journal, scripted simulation, the statistics runs, and the
attribute-count benchmark. Everything is seed-deterministic: the same
flags produce byte-identical artifacts.

The vault model deserves a note. A journal (vault.jsonl in the output
directory) records every command as one JSON line; each invocation
rebuilds the whole deterministic world by replaying the journal, applies
its own command, and appends it. State on disk is therefore nothing but
the command history plus the cloud-visible artifacts (blobs), which is
exactly the trust model: anyone holding the output directory holds what
the cloud would hold.
"""

import argparse
import json
import os
import sys
import time

from . import fbsc, prng, protocol, rsacrt, secretshare, statsuite
from .digests import digest64_ints, digest64_text
from .errors import ParvaultError, ValidationError

_BENCH_DEFAULTS = dict(rsa_bits=1024, pk_bits=20, key_power=4, precision=30,
                       payload=128)


def _diagnostic(exc):
    mod = exc.__class__.__module__.rsplit(".", 1)[-1]
    return f"error: {mod}.{exc.__class__.__name__}: {exc}"


def _base_config(args):
    if getattr(args, "config", None):
        return prng.load_generator_config(args.config)
    return None


def _seeded_config(args, tag):
    base = _base_config(args) or prng.DEFAULT_CONFIG
    mix = digest64_ints(args.seed, digest64_text(tag))
    return prng.GeneratorConfig(seed=(mix % base.n) or 1, m=base.m,
                                i_num=base.i_num, i_den=base.i_den, n=base.n)


def _ensure_out(args):
    os.makedirs(args.out, exist_ok=True)
    return args.out


# ---------------------------------------------------------------------------
# key files for the standalone cipher path
# ---------------------------------------------------------------------------

def _write_keyfile(path, key, stream_seed):
    with open(path, "w") as fh:
        fh.write("[fbsc]\n")
        fh.write(f"pk_sk = {key.pk_sk}\n")
        fh.write(f"r_n = {key.r_n}\n")
        fh.write(f"stream_seed = {stream_seed}\n")


def _read_keyfile(path):
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith(("#", "[")):
                continue
            name, _, value = line.partition("=")
            values[name.strip()] = int(value.strip())
    for need in ("pk_sk", "r_n", "stream_seed"):
        if need not in values:
            raise ValidationError(f"key file {path!r} lacks {need}")
    key = fbsc.SymmetricKey(pk_sk=values["pk_sk"], r_n=values["r_n"])
    return key, values["stream_seed"]


def _stream_configs(stream_seed):
    base = prng.DEFAULT_CONFIG
    mk = lambda tag: prng.GeneratorConfig(  # noqa: E731
        seed=(digest64_ints(stream_seed, digest64_text(tag)) % base.n) or 1,
        m=base.m, i_num=base.i_num, i_den=base.i_den, n=base.n)
    return mk("padding"), mk("keystream")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_keygen(args):
    out = _ensure_out(args)
    kp = rsacrt.keygen(args.rsa_bits, seed=args.seed)
    rsacrt.save_private(kp, os.path.join(out, "rsa_private.txt"))
    rsacrt.save_public(kp.public, os.path.join(out, "rsa_public.txt"))
    key = fbsc.generate_key(_seeded_config(args, "keygen"), pk_bits=56)
    stream_seed = digest64_ints(args.seed, digest64_text("stream"))
    _write_keyfile(os.path.join(out, "symmetric.key"), key, stream_seed)
    print(f"rsa_private.txt rsa_public.txt  ({args.rsa_bits}-bit, e={kp.e})")
    print(f"symmetric.key  (r_n={key.r_n}, {len(str(key.pk_sk))}-digit base)")
    return 0


def _cmd_encrypt(args):
    out = _ensure_out(args)
    with open(args.file, "rb") as fh:
        data = fh.read()
    stem = os.path.splitext(os.path.basename(args.file))[0]
    if args.key:
        key, stream_seed = _read_keyfile(args.key)
    else:
        key = fbsc.generate_key(_seeded_config(args, "encrypt"), pk_bits=56)
        stream_seed = digest64_ints(args.seed, digest64_text("stream"))
        keypath = os.path.join(out, stem + ".key")
        _write_keyfile(keypath, key, stream_seed)
        print(f"wrote {keypath}")
    pad_cfg, ks_cfg = _stream_configs(stream_seed)
    padded = prng.pad_message(data, pad_cfg)
    keystream = prng.generate_bytes(ks_cfg, len(padded))
    elements = fbsc.encrypt_stream(padded, key, keystream, args.precision)
    blob = fbsc.EncryptedBlob(r_n=key.r_n, f_digits=args.precision,
                              key_fingerprint=key.fingerprint,
                              n1_len=prng.N1_LENGTH, n2_len=prng.N2_REPEATS,
                              epoch=0, elements=elements)
    blobpath = os.path.join(out, stem + ".blob")
    with open(blobpath, "wb") as fh:
        fh.write(fbsc.serialize_blob(blob.public_copy()))
    print(f"wrote {blobpath}  ({len(data)} bytes -> {len(elements)} elements)")
    return 0


def _cmd_decrypt(args):
    out = _ensure_out(args)
    with open(args.blob, "rb") as fh:
        blob = fbsc.parse_blob(fh.read())
    key, stream_seed = _read_keyfile(args.key)
    if blob.key_fingerprint != key.fingerprint:
        raise ValidationError("key file does not match the blob fingerprint")
    _, ks_cfg = _stream_configs(stream_seed)
    keystream = prng.generate_bytes(ks_cfg, len(blob.elements))
    padded = fbsc.decrypt_stream(blob.elements, key, keystream, blob.f_digits)
    data = prng.unpad_message(padded)
    stem = os.path.splitext(os.path.basename(args.blob))[0]
    outpath = os.path.join(out, stem + ".out")
    with open(outpath, "wb") as fh:
        fh.write(data)
    print(f"wrote {outpath}  ({len(data)} bytes)")
    return 0


# -- the journal-backed vault ------------------------------------------------

_JOURNAL = "vault.jsonl"


def _vault_params(args):
    return {"seed": args.seed, "prime": args.prime,
            "rsa_bits": args.rsa_bits, "precision": args.precision}


def _load_vault(args):
    """Replay the journal into a fresh world; returns (sim, records)."""
    path = os.path.join(args.out, _JOURNAL)
    records = []
    if os.path.exists(path):
        with open(path) as fh:
            records = [json.loads(line) for line in fh if line.strip()]
    if records:
        header = records[0]
        if header.get("cmd") != "_config":
            raise ValidationError(f"{path!r} lacks the _config header line")
        params = {k: header[k] for k in
                  ("seed", "prime", "rsa_bits", "precision")}
        flags = _vault_params(args)
        for k, v in flags.items():
            if getattr(args, f"{k}_given", False) and v != params[k]:
                raise ValidationError(
                    f"--{k.replace('_', '-')} {v} conflicts with the "
                    f"journal's {params[k]}; the vault pins its parameters")
    else:
        params = _vault_params(args)
    sim = protocol.Simulation(seed=params["seed"], p=params["prime"],
                              rsa_bits=params["rsa_bits"],
                              precision=params["precision"])
    outcomes = protocol.replay_commands(sim, records[1:])
    bad = [o for o in outcomes if not o["ok"]]
    if bad:
        raise ValidationError(f"journal replay diverged at step {bad[0]}")
    return sim, records, params


def _append_vault(args, records, new_records, params):
    path = os.path.join(args.out, _JOURNAL)
    fresh = not records
    with open(path, "a") as fh:
        if fresh:
            fh.write(json.dumps({"cmd": "_config", **params},
                                sort_keys=True) + "\n")
        for rec in new_records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def _write_cloud_blob(args, sim, file_id):
    blobpath = os.path.join(args.out, file_id + ".blob")
    with open(blobpath, "wb") as fh:
        fh.write(sim.cloud_blobs[file_id])
    return blobpath


def _cmd_share(args):
    _ensure_out(args)
    sim, records, params = _load_vault(args)
    with open(args.file, "rb") as fh:
        data = fh.read()
    file_id = os.path.basename(args.file)
    users = [u for u in args.users.split(",") if u]
    if not users:
        raise ValidationError("--users needs at least one receiver")
    new = []
    if args.owner not in sim.policy_db.users:
        creds = ["org:member", f"id:{args.owner}"]
        sim.register(args.owner, creds, "owner")
        new.append({"cmd": "register", "user_id": args.owner,
                    "credentials": creds, "type": "owner"})
    for uid in users:
        if uid not in sim.policy_db.users:
            creds = [f"id:{uid}"]
            sim.register(uid, creds)
            new.append({"cmd": "register", "user_id": uid,
                        "credentials": creds})
    fid, assignment = sim.store_file(args.owner, data, users,
                                     file_name=file_id)
    new.append({"cmd": "store", "owner": args.owner, "file": file_id,
                "sharers": users, "data_hex": data.hex()})
    _append_vault(args, records, new, params)
    blobpath = _write_cloud_blob(args, sim, fid)
    holders = ", ".join(f"{h}:x={x}" for h, x in sorted(assignment.items(),
                                                        key=lambda kv: kv[1]))
    print(f"shared {fid} -> {blobpath}")
    print(f"points: {holders}")
    return 0


def _cmd_access(args):
    _ensure_out(args)
    sim, records, params = _load_vault(args)
    approve = not args.deny_approval
    rec = {"cmd": "access", "user": args.user, "file": args.file,
           "owner_approves": approve}
    try:
        data = sim.request_access(args.user, args.file,
                                  owner_approves=approve)
    except (protocol.AccessDeniedError, protocol.ApprovalWithheldError,
            secretshare.InconsistentPointError,
            secretshare.ThresholdError) as exc:
        rec["expect"] = "deny"
        _append_vault(args, records, [rec], params)
        raise
    rec["expect"] = "grant"
    _append_vault(args, records, [rec], params)
    outpath = os.path.join(args.out, args.file + ".plain")
    with open(outpath, "wb") as fh:
        fh.write(data)
    print(f"granted: wrote {outpath}  ({len(data)} bytes)")
    return 0


def _cmd_revoke(args):
    _ensure_out(args)
    sim, records, params = _load_vault(args)
    entry = sim.policy_db.get_policy(args.file)
    issued = sim.revoke_and_reencrypt(entry.owner_id, args.file, args.user)
    _append_vault(args, records,
                  [{"cmd": "revoke", "owner": entry.owner_id,
                    "file": args.file, "user": args.user}], params)
    blobpath = _write_cloud_blob(args, sim, args.file)
    epoch = sim.server_files[args.file]["key_epoch"]
    print(f"revoked {args.user}; re-encrypted {args.file} at key epoch "
          f"{epoch} -> {blobpath}")
    print("points reissued to: " + ", ".join(sorted(issued)))
    return 0


def _cmd_simulate(args):
    out = _ensure_out(args)
    trace_path = os.path.join(out, "trace.jsonl")
    sim, outcomes = protocol.run_script(args.script, trace_path,
                                        seed=args.seed,
                                        rsa_bits=args.rsa_bits)
    bad = [o for o in outcomes if not o["ok"]]
    for o in outcomes:
        status = "ok " if o["ok"] else "FAIL"
        extra = {k: v for k, v in o.items()
                 if k not in ("step", "cmd", "ok")}
        print(f"  [{status}] step {o['step']:>2} {o['cmd']:<8} {extra}")
    print(f"trace -> {trace_path}  digest {sim.bus.trace_hash():#018x}")
    if bad:
        print(f"error: {len(bad)} of {len(outcomes)} steps diverged",
              file=sys.stderr)
        return 1
    return 0


# -- analysis ----------------------------------------------------------------

def _input_bytes(path):
    """Bytes for statistics: blob -> quantized elements, PGM -> pixels,
    anything else verbatim."""
    if path.endswith(".blob"):
        with open(path, "rb") as fh:
            blob = fbsc.parse_blob(fh.read())
        return bytes(statsuite.element_bytes(blob.elements))
    if path.endswith(".pgm"):
        return statsuite.load_pgm(path).tobytes()
    with open(path, "rb") as fh:
        return fh.read()


def _cmd_analyze_nist(args):
    out = _ensure_out(args)
    data = _input_bytes(args.input)
    bits = statsuite.bits_from_bytes(data)
    results = statsuite.nist_battery(bits, alpha=args.alpha)
    report = statsuite.battery_report_text(results, alpha=args.alpha)
    path = os.path.join(out, "nist_report.txt")
    with open(path, "w") as fh:
        fh.write(report)
    ran = [r for r in results if r.status == "ok"]
    passed = sum(1 for r in ran if r.passed)
    print(f"{passed}/{len(ran)} tests passed on {bits.size} bits "
          f"({len(results) - len(ran)} skipped) -> {path}")
    return 0


def _encrypted_pixels(args, image):
    """Encrypt the image in-memory and map elements back onto its grid."""
    key = fbsc.generate_key(_seeded_config(args, "corr"), pk_bits=56)
    stream_seed = digest64_ints(args.seed, digest64_text("corr-stream"))
    pad_cfg, ks_cfg = _stream_configs(stream_seed)
    padded = prng.pad_message(image.tobytes(), pad_cfg)
    keystream = prng.generate_bytes(ks_cfg, len(padded))
    elements = fbsc.encrypt_stream(padded, key, keystream, args.precision)
    core = elements[prng.N1_LENGTH:prng.N1_LENGTH + image.size]
    return statsuite.element_image(core, image.shape)


def _cmd_analyze_corr(args):
    out = _ensure_out(args)
    image = statsuite.load_pgm(args.input)
    name = os.path.splitext(os.path.basename(args.input))[0]
    if args.encrypted:
        with open(args.encrypted, "rb") as fh:
            blob = fbsc.parse_blob(fh.read())
        core = blob.elements[blob.n1_len:blob.n1_len + image.size]
        if len(core) != image.size:
            raise ValidationError(
                f"blob holds {len(blob.elements)} elements; cannot cover a "
                f"{image.shape[0]}x{image.shape[1]} image")
        enc_img = statsuite.element_image(core, image.shape)
    else:
        enc_img = _encrypted_pixels(args, image)
    rows = []
    for d in ("h", "v", "d"):
        orig = statsuite.adjacent_correlation(image, d, 16384, seed=args.seed)
        enc = statsuite.adjacent_correlation(enc_img, d, 16384,
                                             seed=args.seed)
        rows.append((name, d, orig, enc))
        print(f"  {d}: original {orig:+.4f}  encrypted {enc:+.4f}")
    path = os.path.join(out, "correlation.csv")
    with open(path, "w") as fh:
        fh.write(statsuite.correlation_csv(rows))
    print(f"wrote {path}")
    return 0


def _cmd_analyze_hist(args):
    out = _ensure_out(args)
    data = _input_bytes(args.input)
    chi2, p, counts = statsuite.histogram_chi_square(data)
    path = os.path.join(out, "histogram.csv")
    with open(path, "w") as fh:
        fh.write(statsuite.histogram_csv(counts))
    print(f"chi2 = {chi2:.2f}  p = {p:.6f}  over {len(data)} bytes -> {path}")
    return 0


# -- benchmark ---------------------------------------------------------------

def _trimmed_mean(vals, frac=0.2):
    vs = sorted(vals)
    k = int(len(vs) * frac)
    core = vs[k:len(vs) - k] or vs
    return sum(core) / len(core)


def bench_attributes(counts, repetitions=30, seed=2024, rsa_bits=None,
                     base_config=None):
    """Store/access cost versus owner-attribute count.

    One world per count: the owner holds that many attribute credentials
    and the policy admits one receiver per attribute, so the per-attribute
    protocol work (share point, binding code, wrapped key, delivery) is
    exercised m times per store. Repetitions interleave across counts and
    measure process time, so machine-wide stalls land on every count
    instead of skewing one; the involution power is pinned because drawn
    powers would make the constant cipher cost a noise term. Returns
    (count, encrypt_ms, decrypt_ms) rows of trimmed means.
    """
    if any(c < 2 for c in counts):
        raise ValidationError("attribute counts must be at least 2")
    if repetitions < 10:
        raise ValidationError("need at least 10 repetitions")
    prof = dict(_BENCH_DEFAULTS)
    if rsa_bits is not None:
        prof["rsa_bits"] = rsa_bits
    payload = bytes(range(256)) * (prof["payload"] // 256) \
        + bytes(range(prof["payload"] % 256))
    worlds = {}
    for m in counts:
        sim = protocol.Simulation(
            seed=digest64_ints(seed, m), rsa_bits=prof["rsa_bits"],
            pk_bits=prof["pk_bits"], precision=prof["precision"],
            key_power=prof["key_power"], base_config=base_config)
        sim.register("owner", [f"attr:{i}" for i in range(m)],
                     user_type="owner")
        users = [f"user-{i:03d}" for i in range(m)]
        for uid in users:
            sim.register(uid, [f"holds:attr:{uid}"])
        for _ in range(2):  # warm caches before measuring
            fid, _a = sim.store_file("owner", payload, users)
            sim.request_access(users[0], fid)
        worlds[m] = (sim, users)
    enc = {m: [] for m in counts}
    dec = {m: [] for m in counts}
    for _ in range(repetitions):
        for m in counts:
            sim, users = worlds[m]
            t0 = time.process_time()
            fid, _a = sim.store_file("owner", payload, users)
            enc[m].append((time.process_time() - t0) * 1e3)
            t0 = time.process_time()
            sim.request_access(users[0], fid)
            dec[m].append((time.process_time() - t0) * 1e3)
    return [(m, _trimmed_mean(enc[m]), _trimmed_mean(dec[m]))
            for m in counts]


def linear_fit(rows, col=1):
    """Least squares y = a + b*x over bench rows; returns (a, b, r2)."""
    xs = [float(r[0]) for r in rows]
    ys = [float(r[col]) for r in rows]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return my, 0.0, 1.0 if syy == 0 else 0.0
    b = sxy / sxx
    return my - b * mx, b, (sxy * sxy) / (sxx * syy)


def _cmd_bench(args):
    out = _ensure_out(args)
    counts = [int(c) for c in args.attrs.split(",") if c]
    rows = bench_attributes(counts, repetitions=args.reps, seed=args.seed,
                            rsa_bits=args.rsa_bits_opt,
                            base_config=_base_config(args))
    for m, e, d in rows:
        print(f"  attrs={m:<3d} encrypt {e:8.3f} ms   decrypt {d:8.3f} ms")
    a, b, r2 = linear_fit(rows)
    print(f"encrypt fit: {a:.3f} + {b:.4f}*attrs ms, R^2 = {r2:.4f}")
    path = os.path.join(out, "bench.csv")
    with open(path, "w") as fh:
        fh.write(statsuite.bench_csv(rows))
    print(f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(sub, out_default="parvault-out"):
    sub.add_argument("--config", default=None,
                     help="generator config file overriding the defaults")
    sub.add_argument("--seed", type=int, default=2024)
    sub.add_argument("--out", default=out_default,
                     help="output directory (created if missing)")


class _TrackedPrime(argparse.Action):
    # remembers that the flag was given so the vault can veto conflicts
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        setattr(namespace, f"{self.dest}_given", True)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="parvault",
        description="multiparty-authorized encrypted storage toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("keygen", help="RSA keypair plus a symmetric key")
    _add_common(s)
    s.add_argument("--rsa-bits", type=int, default=512,
                   choices=(64, 512, 1024, 2048))
    s.set_defaults(fn=_cmd_keygen)

    s = subs.add_parser("encrypt", help="encrypt one file to a blob")
    s.add_argument("file")
    _add_common(s)
    s.add_argument("--key", default=None,
                   help="existing key file; omitted -> fresh key is written")
    s.add_argument("--precision", type=int, default=fbsc.DEFAULT_PRECISION)
    s.set_defaults(fn=_cmd_encrypt)

    s = subs.add_parser("decrypt", help="decrypt a blob with its key file")
    s.add_argument("blob")
    _add_common(s)
    s.add_argument("--key", required=True)
    s.set_defaults(fn=_cmd_decrypt)

    for name, fn, helptext in (
            ("share", _cmd_share, "store a file into the vault world"),
            ("access", _cmd_access, "request a shared file"),
            ("revoke", _cmd_revoke, "revoke a user and re-encrypt")):
        s = subs.add_parser(name, help=helptext)
        s.add_argument("file")
        _add_common(s)
        s.add_argument("--prime", type=int,
                       default=secretshare.DEFAULT_PRIME,
                       action=_TrackedPrime)
        s.add_argument("--rsa-bits", dest="rsa_bits", type=int, default=512,
                       choices=(64, 512, 1024, 2048), action=_TrackedPrime)
        s.add_argument("--precision", type=int,
                       default=fbsc.DEFAULT_PRECISION, action=_TrackedPrime)
        if name == "share":
            s.add_argument("--owner", required=True)
            s.add_argument("--users", required=True,
                           help="comma-separated receiver ids")
        else:
            s.add_argument("--user", required=True)
        if name == "access":
            s.add_argument("--deny-approval", action="store_true",
                           help="simulate the owner withholding approval")
        s.set_defaults(fn=fn)

    s = subs.add_parser("simulate", help="replay a protocol script")
    s.add_argument("script")
    _add_common(s)
    s.add_argument("--rsa-bits", dest="rsa_bits", type=int, default=512,
                   choices=(64, 512, 1024, 2048))
    s.set_defaults(fn=_cmd_simulate)

    s = subs.add_parser("analyze", help="statistics on files and blobs")
    asubs = s.add_subparsers(dest="analysis", required=True)
    a = asubs.add_parser("nist", help="randomness battery")
    a.add_argument("input")
    _add_common(a)
    a.add_argument("--alpha", type=float, default=0.01)
    a.set_defaults(fn=_cmd_analyze_nist)
    a = asubs.add_parser("corr", help="adjacent-pixel correlation")
    a.add_argument("input", help="PGM image")
    _add_common(a)
    a.add_argument("--encrypted", default=None,
                   help="blob of this image; omitted -> encrypted in-memory")
    a.add_argument("--precision", type=int, default=fbsc.DEFAULT_PRECISION)
    a.set_defaults(fn=_cmd_analyze_corr)
    a = asubs.add_parser("hist", help="byte histogram uniformity")
    a.add_argument("input")
    _add_common(a)
    a.set_defaults(fn=_cmd_analyze_hist)

    s = subs.add_parser("bench", help="cost versus attribute count")
    _add_common(s)
    s.add_argument("--attrs", default="2,4,8,16,32",
                   help="comma-separated attribute counts")
    s.add_argument("--reps", type=int, default=30)
    s.add_argument("--rsa-bits", dest="rsa_bits_opt", type=int, default=None,
                   choices=(64, 512, 1024, 2048))
    s.set_defaults(fn=_cmd_bench)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ParvaultError as exc:
        print(_diagnostic(exc), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
