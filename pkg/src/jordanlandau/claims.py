"""Per-identity verification records."""

from __future__ import annotations

from dataclasses import asdict, dataclass

PASS = "pass"
FAIL = "fail"
DISCREPANCY = "documented-discrepancy"
SKIPPED = "skipped"
STATUSES = (PASS, FAIL, DISCREPANCY, SKIPPED)

CANONICAL = "canonical-bopp"
CHIRAL = "paper-chiral"
ALGEBRAIC = "algebraic"


@dataclass(frozen=True)
class ClaimReport:
    claim_id: str
    paper_anchor: str
    representation: str
    residual: float
    tolerance: float
    status: str
    notes: str = ""

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    def to_dict(self) -> dict:
        return asdict(self)


def judged(
    claim_id: str,
    anchor: str,
    representation: str,
    residual: float,
    tolerance: float,
    notes: str = "",
    on_fail: str = FAIL,
) -> ClaimReport:
    """Build a report whose status follows ``residual <= tolerance``.

    ``on_fail`` lets known paper inconsistencies land as
    ``documented-discrepancy`` instead of ``fail``.
    """
    status = PASS if residual <= tolerance else on_fail
    return ClaimReport(claim_id, anchor, representation, float(residual), float(tolerance), status, notes)
