"""Line-oriented Structured Command String (SCS) format.

SCS is the intermediate representation between free-form scenario prose
and the structured topology document. Every statement lives on its own
line and is prefixed with the key it belongs to:

    R-1: type router
    R-1: interface GigabitEthernet0/0 ip 192.168.0.1/24
    R-1: static_route 192.168.100.0/24 via R-2
    R-1,R-2: R-1.GigabitEthernet0/0 <-> R-2.GigabitEthernet0/0

A key is either one device identifier (a device section) or exactly two
identifiers separated by one comma (a connection section). Blank lines
and lines starting with '#' are ignored. Parsing is purely structural;
semantic checks (IP ranges, adjacency and so on) happen downstream.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field


class ScsError(ValueError):
    """Base class for SCS parse failures."""


class MalformedLine(ScsError):
    def __init__(self, lineno: int, line: str, reason: str) -> None:
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno
        self.line = line
        self.reason = reason


class KeyArityError(ScsError):
    def __init__(self, lineno: int, key: str) -> None:
        super().__init__(
            f"line {lineno}: key {key!r} has {key.count(',')} commas, at most 1 allowed"
        )
        self.lineno = lineno
        self.key = key


class EmptyDocument(ScsError):
    def __init__(self) -> None:
        super().__init__("document contains no statements")


class LineKind(enum.Enum):
    TYPE_DECL = "TypeDecl"
    NAME_DECL = "NameDecl"
    INTERFACE_DECL = "InterfaceDecl"
    STATIC_ROUTE_DECL = "StaticRouteDecl"
    CONNECTION_DECL = "ConnectionDecl"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SCSLineKind:
    """Classification of a single trimmed SCS value line."""

    kind: LineKind
    raw: str


@dataclass
class SCSDocument:
    """Ordered key -> lines mapping plus the text it was parsed from.

    Equality ignores ``source_text`` so that a document survives a
    render/parse round trip even when the original text used different
    spacing or comments.
    """

    entries: list[tuple[str, list[str]]]
    source_text: str = field(default="", compare=False)

    def keys(self) -> list[str]:
        return [key for key, _ in self.entries]

    def lines_for(self, key: str) -> list[str]:
        for k, lines in self.entries:
            if k == key:
                return lines
        raise KeyError(key)

    def device_keys(self) -> list[str]:
        return [key for key, _ in self.entries if "," not in key]

    def connection_keys(self) -> list[str]:
        return [key for key, _ in self.entries if "," in key]

    def line_count(self) -> int:
        return sum(len(lines) for _, lines in self.entries)


_IDENT_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_-]*$")

_TYPE_RE = re.compile(r"^type\s+(?P<type>router|switch|pc)$", re.IGNORECASE)
_NAME_RE = re.compile(r"^name\s+(?P<name>\S+)$", re.IGNORECASE)
_IFACE_RE = re.compile(
    r"^interface\s+(?P<name>.+?)\s+ip\s+(?P<addr>\d+(?:\.\d+){3})"
    r"(?:/(?P<plen>\d+)|\s+mask\s+(?P<mask>\d+(?:\.\d+){3}))$",
    re.IGNORECASE,
)
# Destination and via are both optional so that a route whose details are
# still unknown ("static_route" on its own) survives into the topology,
# where the validator turns it into a clarification request.
_ROUTE_RE = re.compile(
    r"^static_route(?:\s+(?P<dest>\d+(?:\.\d+){3})/(?P<plen>\d+))?"
    r"(?:\s+via\s+(?P<via>\S+))?$",
    re.IGNORECASE,
)
_CONN_RE = re.compile(
    r"^(?P<dev_a>[^.\s]+)\.(?P<if_a>.+?)\s*<->\s*(?P<dev_b>[^.\s]+)\.(?P<if_b>.+)$"
)


def classify_line(line: str) -> SCSLineKind:
    """Match a trimmed value line against the grammar productions.

    Total function: anything unmatched is Unknown, never an error.
    """
    if _TYPE_RE.match(line):
        kind = LineKind.TYPE_DECL
    elif _NAME_RE.match(line):
        kind = LineKind.NAME_DECL
    elif _IFACE_RE.match(line):
        kind = LineKind.INTERFACE_DECL
    elif _ROUTE_RE.match(line):
        kind = LineKind.STATIC_ROUTE_DECL
    elif _CONN_RE.match(line):
        kind = LineKind.CONNECTION_DECL
    else:
        kind = LineKind.UNKNOWN
    return SCSLineKind(kind=kind, raw=line)


def match_type(line: str) -> re.Match | None:
    return _TYPE_RE.match(line)


def match_name(line: str) -> re.Match | None:
    return _NAME_RE.match(line)


def match_interface(line: str) -> re.Match | None:
    return _IFACE_RE.match(line)


def match_static_route(line: str) -> re.Match | None:
    return _ROUTE_RE.match(line)


def match_connection(line: str) -> re.Match | None:
    return _CONN_RE.match(line)


def parse_scs(text: str) -> SCSDocument:
    """Parse SCS text into a document.

    Keys keep first-appearance order; repeated keys merge with line order
    preserved. Each stored line has the "KEY:" prefix removed and is
    whitespace-trimmed.

    Raises MalformedLine, KeyArityError or EmptyDocument.
    """
    entries: list[tuple[str, list[str]]] = []
    index: dict[str, list[str]] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise MalformedLine(lineno, raw, "missing 'key:' prefix")
        key, content = line.split(":", 1)
        key = key.strip()
        content = content.strip()
        if not key:
            raise MalformedLine(lineno, raw, "empty key")
        if key.count(",") >= 2:
            raise KeyArityError(lineno, key)
        parts = [part.strip() for part in key.split(",")]
        if any(not _IDENT_RE.match(part) for part in parts):
            raise MalformedLine(lineno, raw, "key is not a device identifier")
        key = ",".join(parts)
        if not content:
            raise MalformedLine(lineno, raw, "empty statement after key")
        if key not in index:
            lines: list[str] = []
            index[key] = lines
            entries.append((key, lines))
        index[key].append(content)

    if not entries:
        raise EmptyDocument()
    return SCSDocument(entries=entries, source_text=text)


def render_scs(doc: SCSDocument) -> str:
    """Render a document to canonical SCS text (LF line endings).

    For any document produced by parse_scs, parsing the rendered text
    yields an equal document.
    """
    out: list[str] = []
    for key, lines in doc.entries:
        for line in lines:
            out.append(f"{key}: {line}")
    return "\n".join(out) + "\n"
