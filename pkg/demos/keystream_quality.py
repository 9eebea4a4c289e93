"""Walk the keystream generator and put its output through the battery.

The generator is one multiplicative recurrence over a 61-bit prime field,
iterated exactly (big integers, no float in the loop). Each state yields
58 bits; packed bits become padding prefixes and cipher keystream bytes.
"""

from parvault import prng
from parvault.statsuite import battery_report_text, histogram_chi_square, \
    nist_battery

cfg = prng.DEFAULT_CONFIG
print("recurrence: state' = (state * m * i_num) // i_den  mod n")
print(f"  seed  = {cfg.seed}")
print(f"  m     = {cfg.m}")
print(f"  i     = {cfg.i_num} / 2^32  (irrational-style fixed point)")
print(f"  n     = 2^61 - 1 = {cfg.n}")
print()

print("first eight states:")
for i, value in enumerate(prng.generate_values(cfg, 8)):
    print(f"  t={i}  {value}")
print()

# a modest slice is enough for every test whose floor it clears; the
# million-bit runs live in the test suite
bits = prng.generate_bits(cfg, 150_000)
print(f"battery over {bits.size} bits:")
print(battery_report_text(nist_battery(bits)))

data = prng.generate_bytes(cfg, 50_000)
chi2, p, _ = histogram_chi_square(data)
print(f"byte histogram over {len(data)} bytes: chi2 = {chi2:.1f}, "
      f"p = {p:.4f}")
