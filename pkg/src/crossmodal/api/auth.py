"""Account and token storage on SQLite.

Passwords are stored as salted PBKDF2-SHA256 digests; a successful
register or login mints an opaque bearer token.  One store instance is
safe to share across request threads.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import sqlite3
import threading
import time
from pathlib import Path

from ..errors import BadCredentialsError, UnauthenticatedError, UserExistsError

PBKDF2_ITERATIONS = 120_000

_SCHEMA = """
CREATE TABLE IF NOT EXISTS accounts (
    username TEXT PRIMARY KEY,
    salt     BLOB NOT NULL,
    digest   BLOB NOT NULL,
    created  REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS tokens (
    token    TEXT PRIMARY KEY,
    username TEXT NOT NULL REFERENCES accounts(username),
    created  REAL NOT NULL
);
"""


def _derive(password: str, salt: bytes) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt,
                               PBKDF2_ITERATIONS)


class AuthStore:

    def __init__(self, db_path: str | Path = ":memory:"):
        if db_path != ":memory:":
            Path(db_path).parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(str(db_path), check_same_thread=False)
        self._conn.executescript(_SCHEMA)
        self._lock = threading.Lock()

    def close(self) -> None:
        self._conn.close()

    def register(self, username: str, password: str) -> str:
        """Create an account and return a fresh bearer token."""
        if not username or not password:
            raise BadCredentialsError("username and password are required")
        salt = secrets.token_bytes(16)
        digest = _derive(password, salt)
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT INTO accounts VALUES (?, ?, ?, ?)",
                    (username, salt, digest, time.time()))
            except sqlite3.IntegrityError:
                raise UserExistsError(
                    f"account {username!r} already exists") from None
            self._conn.commit()
        return self._mint(username)

    def login(self, username: str, password: str) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT salt, digest FROM accounts WHERE username = ?",
                (username,)).fetchone()
        if row is None or not hmac.compare_digest(row[1],
                                                  _derive(password, row[0])):
            raise BadCredentialsError("unknown account or wrong password")
        return self._mint(username)

    def _mint(self, username: str) -> str:
        token = secrets.token_hex(16)
        with self._lock:
            self._conn.execute("INSERT INTO tokens VALUES (?, ?, ?)",
                               (token, username, time.time()))
            self._conn.commit()
        return token

    def resolve(self, token: str) -> str:
        """Username owning a token, or UnauthenticatedError."""
        with self._lock:
            row = self._conn.execute(
                "SELECT username FROM tokens WHERE token = ?",
                (token,)).fetchone()
        if row is None:
            raise UnauthenticatedError("unknown or expired token")
        return row[0]
