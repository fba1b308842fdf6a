from __future__ import annotations


class RdsWalkError(Exception):
    """Base class for every error raised by rdswalk."""

    code = "RDSWALK_ERROR"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def as_dict(self) -> dict:
        return {"ok": False, "error": self.code, "detail": self.detail}


class DomainError(RdsWalkError):
    code = "DOMAIN_ERROR"


class NoSeedsError(DomainError):
    code = "NO_SEEDS"


class SizeLimitError(DomainError):
    code = "SIZE_LIMIT"


class EdgeListParseError(DomainError):
    code = "PARSE_ERROR"

    def __init__(self, detail: str, line_no: int):
        super().__init__(f"line {line_no}: {detail}")
        self.line_no = line_no


class ConvergenceError(RdsWalkError):
    code = "NOT_CONVERGED"
