import pytest
from hypothesis import given, strategies as st

from text2net import scs
from text2net.scs import (
    EmptyDocument,
    KeyArityError,
    LineKind,
    MalformedLine,
    SCSDocument,
    classify_line,
    parse_scs,
    render_scs,
)


def test_parse_single_device_two_lines():
    doc = parse_scs("R-1: type router\nR-1: interface Gi0/0 ip 192.168.0.1/24")
    assert doc.keys() == ["R-1"]
    assert doc.lines_for("R-1") == ["type router", "interface Gi0/0 ip 192.168.0.1/24"]


def test_parse_empty_document():
    with pytest.raises(EmptyDocument):
        parse_scs("")
    with pytest.raises(EmptyDocument):
        parse_scs("\n# only a comment\n\n")


def test_parse_key_arity_error():
    with pytest.raises(KeyArityError):
        parse_scs("R-1,R-2,R-3: link")


def test_parse_missing_colon():
    with pytest.raises(MalformedLine):
        parse_scs("no colon here")


def test_parse_empty_statement():
    with pytest.raises(MalformedLine):
        parse_scs("R-1:   ")


def test_parse_merges_repeated_keys_preserving_order():
    doc = parse_scs("R-1: type router\nR-2: type router\nR-1: name core")
    assert doc.keys() == ["R-1", "R-2"]
    assert doc.lines_for("R-1") == ["type router", "name core"]


def test_parse_accepts_comments_blanks_and_crlf():
    doc = parse_scs("# header\r\nR-1: type router\r\n\r\nR-1: name core\r\n")
    assert doc.line_count() == 2


def test_line_preservation():
    text = "# c\nR-1: type router\n\nR-1: name core\nR-2: type pc\n"
    doc = parse_scs(text)
    source_lines = [
        l for l in text.splitlines() if l.strip() and not l.strip().startswith("#")
    ]
    assert doc.line_count() == len(source_lines)


@pytest.mark.parametrize(
    "line,kind",
    [
        ("type router", LineKind.TYPE_DECL),
        ("type pc", LineKind.TYPE_DECL),
        ("type quantum", LineKind.UNKNOWN),
        ("name core-1", LineKind.NAME_DECL),
        ("interface Gi0/0 ip 192.168.0.1/24", LineKind.INTERFACE_DECL),
        ("interface Fa 0/1 ip 192.168.0.1 mask 255.255.255.0", LineKind.INTERFACE_DECL),
        ("interface Gi0/0 ip 192.168.0.300/24", LineKind.INTERFACE_DECL),
        ("static_route 192.168.100.0/24 via R-2", LineKind.STATIC_ROUTE_DECL),
        ("static_route 10.0.0.0/8 via 192.168.0.2", LineKind.STATIC_ROUTE_DECL),
        ("static_route", LineKind.STATIC_ROUTE_DECL),
        ("R-1.Gi0/0 <-> R-2.Gi0/0", LineKind.CONNECTION_DECL),
        ("frobnicate", LineKind.UNKNOWN),
    ],
)
def test_classify_line(line, kind):
    result = classify_line(line)
    assert result.kind is kind
    assert result.raw == line


def test_render_single_line():
    doc = SCSDocument(entries=[("R-1", ["type router"])])
    assert render_scs(doc) == "R-1: type router\n"


def test_round_trip_explicit():
    text = (
        "R-1: type router\n"
        "R-1: interface GigabitEthernet0/0 ip 192.168.0.1/24\n"
        "R-1,R-2: R-1.GigabitEthernet0/0 <-> R-2.GigabitEthernet0/0\n"
    )
    doc = parse_scs(text)
    assert parse_scs(render_scs(doc)) == doc
    # parsing canonical text is a fixed point
    assert render_scs(parse_scs(render_scs(doc))) == render_scs(doc)


_ident = st.from_regex(r"[A-Za-z0-9][A-Za-z0-9_-]{0,8}", fullmatch=True)
_content = st.one_of(
    st.just("type router"),
    st.just("type pc"),
    st.builds("name {}".format, _ident),
    st.builds(
        "interface Gi0/{} ip 10.{}.{}.1/24".format,
        st.integers(0, 9), st.integers(0, 255), st.integers(0, 255),
    ),
    st.builds("static_route 10.{}.0.0/16 via {}".format, st.integers(0, 255), _ident),
)


@given(st.lists(st.tuples(_ident, st.lists(_content, min_size=1, max_size=4)),
                min_size=1, max_size=6))
def test_round_trip_property(raw_entries):
    merged: dict[str, list[str]] = {}
    for key, lines in raw_entries:
        merged.setdefault(key, []).extend(lines)
    doc = SCSDocument(entries=list(merged.items()))
    assert parse_scs(render_scs(doc)) == doc


@given(st.text(alphabet=st.characters(blacklist_characters="\n#:"), min_size=1, max_size=30))
def test_key_arity_fuzz_never_accepts_two_commas(key):
    if key.count(",") < 2:
        return
    with pytest.raises(scs.ScsError):
        parse_scs(f"{key}: type router")
