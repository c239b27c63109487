"""Line-oriented ``key: value`` reports.

The machine format starts with a versioned header and holds nothing that
varies between runs (no timings, no addresses), so equal inputs give
byte-identical reports.
"""

from __future__ import annotations

REPORT_VERSION = 1
HEADER = f"gluekit-report {REPORT_VERSION}"


def _flat(value) -> str:
    text = str(value)
    return text.replace("\\", "\\\\").replace("\n", "\\n")


class Report:
    def __init__(self, command: str):
        self.command = command
        self.entries: list[tuple[str, object]] = []
        # shown only in the text format
        self.notes: list[str] = []

    def add(self, key: str, value) -> None:
        self.entries.append((key, value))

    def add_list(self, key: str, values) -> None:
        values = list(values)
        self.add(f"{key}.count", len(values))
        for i, v in enumerate(values, 1):
            self.add(f"{key}.{i}", v)

    def note(self, line: str) -> None:
        self.notes.append(line)

    def get(self, key: str, default=None):
        for k, v in self.entries:
            if k == key:
                return v
        return default

    def render(self, fmt: str = "text") -> str:
        if fmt == "report":
            lines = [HEADER, f"command: {self.command}"]
            lines += [f"{k}: {_flat(v)}" for k, v in self.entries]
            return "\n".join(lines) + "\n"
        width = max((len(k) for k, _ in self.entries), default=0)
        lines = [f"{k.ljust(width)}  {v}" for k, v in self.entries]
        lines += self.notes
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Inverse of the machine format, for tests and diffing."""
    lines = text.splitlines()
    if not lines or lines[0] != HEADER:
        raise ValueError("not a gluekit report (bad header)")
    out = {}
    for line in lines[1:]:
        key, sep, value = line.partition(": ")
        if not sep:
            raise ValueError(f"malformed report line {line!r}")
        out[key] = value
    return out
