"""Shared state for the acceptance summary printed at the end of a run."""

# criterion number -> [description, passed so far]
RESULTS: dict = {}
# free-form lines from the report-only probes
PROBES: list = []
# (winding numbers, strictly decreasing) for every closed trajectory seen
WINDINGS: list = []
# (tau, elliptic winding numbers) for every simulated signature solution
RECURRENCES: list = []
# (m, n, nonreal S roots) for every certificate inspected
CERTIFICATES: list = []


def record(number: int, description: str, passed: bool) -> None:
    entry = RESULTS.setdefault(number, [description, True])
    entry[1] = entry[1] and passed


def summary_lines() -> list:
    lines = [f"{'PASS' if ok else 'FAIL'} criterion {n}: {desc}" for n, (desc, ok) in sorted(RESULTS.items())]
    return lines + [f"probe: {p}" for p in PROBES]
