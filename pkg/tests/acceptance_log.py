"""Shared store for acceptance outcomes, printed at the end of the session."""

RESULTS = {}


def report(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = (bool(ok), detail)
    print(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
