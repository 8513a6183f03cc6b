import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

# table builds are cached on first use, so per-example timing is meaningless
settings.register_profile("default", deadline=None)
settings.load_profile("default")

# criterion number -> list of (ok, detail), filled by the acceptance tests
ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}


def record(criterion: int, ok: bool, detail: str):
    ACCEPTANCE.setdefault(criterion, []).append((ok, detail))
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        results = ACCEPTANCE[n]
        ok = all(r for r, _ in results)
        details = "; ".join(d for _, d in results)
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({details})")
