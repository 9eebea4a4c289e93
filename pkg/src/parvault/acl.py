"""Policy layer: user registry, per-file ACL entries, revocation state.

The registry holds UserRecord rows (id, type, credential strings) plus an
inverted credential index so identical credential strings are stored once
and map to every holder. Each file gets exactly one PolicyEntry (one key
per file), carrying the authorized and revoked user sets, a fixed
threshold of 3, a monotone epoch, and the needs_reencryption flag the
protocol layer acts on after revocations.

Persistence is an append-only event log, one JSON object per line with a
strictly increasing sequence number; loading replays the log into the
in-memory snapshot. Storage-overhead accounting lives here too: a user
carries their m credentials plus one share point (m+1 parameters), the
server carries the per-file ciphertext-rooted elements plus one binding
code (K_c+1), and the audit helpers count leaf parameters in serialized
state so tests can hold the bookkeeping to those formulas.
"""

import json
import warnings
from dataclasses import dataclass, field

from .errors import ParvaultError, ValidationError

USER_TYPES = ("owner", "user")

THRESHOLD = 3


class DuplicateUserError(ParvaultError):
    """user_id already registered."""


class UnknownUserError(ParvaultError):
    """user_id not in the registry."""


class NotOwnerError(ParvaultError):
    """Operation reserved for the policy owner."""


class PolicyExistsError(ParvaultError):
    """A policy for this file already exists (one key per file)."""


class NoPolicyError(ParvaultError):
    """No policy recorded for this file."""


@dataclass
class UserRecord:
    """Registry row: identity, type, and attribute credential strings."""

    user_id: str
    user_type: str
    credentials: list

    def __post_init__(self):
        if not self.user_id:
            raise ValidationError("user_id must be non-empty")
        if self.user_type not in USER_TYPES:
            raise ValidationError(f"user_type must be one of {USER_TYPES}")
        if not self.credentials:
            raise ValidationError("credentials list must be non-empty")
        if len(set(self.credentials)) != len(self.credentials):
            raise ValidationError("duplicate credential strings for one user")


@dataclass
class PolicyEntry:
    file_id: str
    owner_id: str
    authorized_user_ids: set
    threshold: int = THRESHOLD
    epoch: int = 0
    priority: int = 0
    revoked_user_ids: set = field(default_factory=set)
    needs_reencryption: bool = False


@dataclass(frozen=True)
class AccessDecision:
    granted: bool
    reason: str


class PolicyDb:
    """Registry + policy store with an optional append-only event log."""

    def __init__(self, log_path=None):
        self.users = {}
        self.credential_index = {}
        self.policies = {}
        self._log_path = log_path
        self._seq = 0

    # -- event log ----------------------------------------------------------

    def _append(self, kind, **payload):
        self._seq += 1
        if self._log_path:
            rec = {"seq": self._seq, "kind": kind, **payload}
            with open(self._log_path, "a") as fh:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    @classmethod
    def load(cls, log_path):
        """Rebuild the snapshot by replaying the event log."""
        db = cls()
        with open(log_path) as fh:
            last_seq = 0
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if rec["seq"] <= last_seq:
                    raise ValidationError("event log sequence not increasing")
                last_seq = rec["seq"]
                db._replay(rec)
        db._seq = last_seq
        db._log_path = log_path
        return db

    def _replay(self, rec):
        kind = rec["kind"]
        if kind == "register":
            self.register_user(UserRecord(rec["user_id"], rec["user_type"],
                                          list(rec["credentials"])))
        elif kind == "create_policy":
            self.create_policy(rec["owner_id"], rec["file_id"],
                               set(rec["authorized"]), rec["priority"])
        elif kind == "revoke":
            self.revoke_user(rec["owner_id"], rec["file_id"], rec["user_id"])
        elif kind == "grant":
            self.grant_user(rec["owner_id"], rec["file_id"], rec["user_id"])
        elif kind == "epoch":
            self.advance_epoch(rec["file_id"])
        elif kind == "reencrypted":
            self.mark_reencrypted(rec["file_id"])
        else:
            raise ValidationError(f"unknown event kind {kind!r}")

    # -- registry -----------------------------------------------------------

    def register_user(self, record):
        if record.user_id in self.users:
            raise DuplicateUserError(f"user {record.user_id!r} already registered")
        cred_set = frozenset(record.credentials)
        for other in self.users.values():
            if frozenset(other.credentials) == cred_set:
                warnings.warn(f"credential set of {record.user_id!r} duplicates "
                              f"{other.user_id!r}; index entries are shared",
                              stacklevel=2)
                break
        self.users[record.user_id] = record
        for cred in record.credentials:
            self.credential_index.setdefault(cred, set()).add(record.user_id)
        self._append("register", user_id=record.user_id,
                     user_type=record.user_type,
                     credentials=list(record.credentials))
        return record.user_id

    def get_user(self, user_id):
        try:
            return self.users[user_id]
        except KeyError:
            raise UnknownUserError(f"unknown user {user_id!r}") from None

    # -- policies -----------------------------------------------------------

    def create_policy(self, owner_id, file_id, authorized, priority=0):
        owner = self.get_user(owner_id)
        if owner.user_type != "owner":
            raise NotOwnerError(f"{owner_id!r} is not an owner")
        if file_id in self.policies:
            raise PolicyExistsError(f"file {file_id!r} already has a policy; "
                                    "one key per file")
        for uid in authorized:
            self.get_user(uid)
        entry = PolicyEntry(file_id=file_id, owner_id=owner_id,
                            authorized_user_ids=set(authorized),
                            priority=priority)
        self.policies[file_id] = entry
        self._append("create_policy", owner_id=owner_id, file_id=file_id,
                     authorized=sorted(authorized), priority=priority)
        return entry

    def get_policy(self, file_id):
        try:
            return self.policies[file_id]
        except KeyError:
            raise NoPolicyError(f"no policy for file {file_id!r}") from None

    def check_access(self, user_id, file_id, presented_credentials):
        """Grant only to an authorized, unrevoked user presenting exactly
        the registered credential list."""
        entry = self.get_policy(file_id)
        if user_id not in self.users:
            return AccessDecision(False, "unknown user")
        if user_id in entry.revoked_user_ids:
            return AccessDecision(False, "user revoked")
        if user_id not in entry.authorized_user_ids:
            return AccessDecision(False, "user not authorized")
        registered = self.users[user_id].credentials
        if list(presented_credentials) != list(registered):
            return AccessDecision(False, "credential mismatch")
        return AccessDecision(True, "authorized")

    def revoke_user(self, owner_id, file_id, user_id):
        entry = self.get_policy(file_id)
        if owner_id != entry.owner_id:
            raise NotOwnerError(f"{owner_id!r} does not own {file_id!r}")
        if user_id not in entry.authorized_user_ids:
            return entry
        entry.authorized_user_ids.discard(user_id)
        entry.revoked_user_ids.add(user_id)
        entry.needs_reencryption = True
        entry.epoch += 1
        self._append("revoke", owner_id=owner_id, file_id=file_id,
                     user_id=user_id)
        return entry

    def grant_user(self, owner_id, file_id, user_id):
        """Re-admit a user (possibly previously revoked); epoch advances and
        re-encryption is required before the grant is usable."""
        entry = self.get_policy(file_id)
        if owner_id != entry.owner_id:
            raise NotOwnerError(f"{owner_id!r} does not own {file_id!r}")
        self.get_user(user_id)
        entry.revoked_user_ids.discard(user_id)
        entry.authorized_user_ids.add(user_id)
        entry.needs_reencryption = True
        entry.epoch += 1
        self._append("grant", owner_id=owner_id, file_id=file_id,
                     user_id=user_id)
        return entry

    def advance_epoch(self, file_id):
        entry = self.get_policy(file_id)
        entry.epoch += 1
        self._append("epoch", file_id=file_id)
        return entry.epoch

    def mark_reencrypted(self, file_id):
        entry = self.get_policy(file_id)
        entry.needs_reencryption = False
        self._append("reencrypted", file_id=file_id)
        return entry

    # -- snapshots ----------------------------------------------------------

    def snapshot(self):
        """JSON-serializable view of the whole store (for cloud backup)."""
        return {
            "users": {uid: {"user_type": rec.user_type,
                            "credentials": list(rec.credentials)}
                      for uid, rec in sorted(self.users.items())},
            "policies": {fid: {"owner_id": e.owner_id,
                               "authorized": sorted(e.authorized_user_ids),
                               "revoked": sorted(e.revoked_user_ids),
                               "threshold": e.threshold,
                               "epoch": e.epoch,
                               "priority": e.priority,
                               "needs_reencryption": e.needs_reencryption}
                         for fid, e in sorted(self.policies.items())},
        }


# ---------------------------------------------------------------------------
# storage-overhead accounting
# ---------------------------------------------------------------------------

def storage_overhead(m, k_c):
    """Parameter counts (user, server) for m credentials and k_c
    ciphertext-rooted elements: (m+1, k_c+1)."""
    if m < 0 or k_c < 0:
        raise ValidationError("counts must be nonnegative")
    return m + 1, k_c + 1


def count_user_parameters(user_state):
    """Leaf parameters in a serialized per-user, per-file state: credential
    strings plus the single share point."""
    count = len(user_state.get("credentials", []))
    if user_state.get("point") is not None:
        count += 1
    return count


def count_server_parameters(file_state):
    """Leaf parameters in a serialized server per-file state: each
    ciphertext-rooted element plus the binding code."""
    count = len(file_state.get("ciphertext_elements", []))
    if file_state.get("binding_code") is not None:
        count += 1
    return count
