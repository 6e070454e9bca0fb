"""Collects one verdict line per acceptance criterion for the terminal summary."""

LINES: list[str] = []


def report(label: str, passed: bool, detail: str) -> None:
    line = f"{'PASS' if passed else 'FAIL'} {label}: {detail}"
    LINES.append(line)
    print(line)
