"""Split a secret across a parabola; three points rebuild it, two reveal
nothing.

The linear and quadratic coefficients are digests of the owner's
attribute strings, the constant term is the secret. Every participant
holds one point; the organization server always holds x=1 and the owner
x=2, so no two receivers can meet the threshold alone.
"""

from itertools import combinations

from parvault import secretshare

attributes = ["clearance:blue", "site:hq"]
secret = 1234
policy = secretshare.derive_coefficients(attributes, secret)
print(f"attributes {attributes} and secret {secret} give")
print(f"  F(X) = {policy.a0} + {policy.a1}*X + {policy.a2}*X^2  (mod p)")
print()

points = secretshare.generate_points(policy, 6)
print("issued points:")
for pt in points:
    print(f"  x={pt.x}  y={pt.y}  ({pt.role})")
print()

chosen = [points[1], points[3], points[4]]
a0, rebuilt = secretshare.reconstruct_secret(chosen)
print(f"x = 2, 4, 5 reconstruct a0 = {a0}, "
      f"coefficients ({rebuilt.a0}, {rebuilt.a1}, {rebuilt.a2})")

answers = {secretshare.reconstruct_secret(list(s))[0]
           for s in combinations(points, 3)}
print(f"all {sum(1 for _ in combinations(points, 3))} three-subsets "
      f"agree: {answers}")
print()

try:
    secretshare.reconstruct_secret(points[:2])
except secretshare.ThresholdError as exc:
    print(f"two points: {exc}")

try:
    secretshare.reconstruct_secret([points[0], points[0], points[1]])
except secretshare.DuplicatePointError as exc:
    print(f"replayed point: {exc}")

# the hiding argument, made concrete at a toy prime: fix two points, then
# for every candidate secret there is exactly one coefficient pair that
# explains them, so the points prefer no candidate
p = 101
toy = secretshare.ParabolicPolicy(a0=40, a1=13, a2=7, p=p)
q1, q2 = secretshare.generate_points(toy, 3)[:2]
consistent = {s: 0 for s in range(p)}
for a1 in range(p):
    for a2 in range(p):
        s = (q1.y - a1 * q1.x - a2 * q1.x * q1.x) % p
        if (s + a1 * q2.x + a2 * q2.x * q2.x) % p == q2.y:
            consistent[s] += 1
counts = set(consistent.values())
print()
print(f"at p={p}: candidate-secret consistency counts over two shares "
      f"= {counts}")
