"""parvault: multiparty-authorized encrypted storage.

A keystream generator feeding an involution stream cipher, a parabolic
secret-sharing layer for three-party authorization, CRT-accelerated RSA key
wrapping, an attribute-checked access-control layer, a deterministic
four-participant protocol simulator, and a statistical evaluation suite.
"""

__version__ = "0.1.0"
