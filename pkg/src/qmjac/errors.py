"""Error type shared by every module.

Each failure carries a short machine-readable ``code`` (for example
``BAD_PRIME`` or ``ANSATZ_VIOLATED``) so callers and the CLI can branch on
it without parsing messages.
"""

from __future__ import annotations


class QMError(Exception):
    def __init__(self, code: str, message: str = ""):
        super().__init__(f"{code}: {message}" if message else code)
        self.code = code
        self.message = message

    def to_json(self) -> dict:
        return {"error": self.code, "message": self.message}
