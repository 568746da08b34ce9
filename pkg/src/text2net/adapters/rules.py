"""Deterministic constrained-English scenario converter.

Turns the sentence families used in routing scenarios (device
declarations, interface assignments in slash and mask form, connection
statements, loopback-as-internal-network statements, static-route
statements with or without detail) into SCS text. When static routing is
mentioned but no concrete routes can be derived from the text, the
converter asks for them instead of guessing.

Scope is intentionally narrow: compositional variants of the supported
sentence patterns, not open-domain English. Sentences that carry
configuration signals (interface names, addresses) but match no pattern
raise UnparsableSentence rather than being dropped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..extractor import mask_to_prefix, NonContiguousMask
from ..prompts import static_route_question
from .base import AdapterError, ClarifyOutcome, Outcome, RejectOutcome, ScsOutcome


class UnparsableSentence(AdapterError):
    def __init__(self, index: int, sentence: str, reason: str = "no pattern matched") -> None:
        super().__init__(f"sentence {index + 1}: {reason}: {sentence!r}")
        self.index = index
        self.sentence = sentence


_DEV = r"[A-Za-z][A-Za-z0-9]*-?\d+"
_IF = r"(?:GigabitEthernet|FastEthernet|Loopback)[\d/]+"
_ADDR = r"\d+(?:\.\d+){3}/\d+"
_BARE_ADDR = r"\d+(?:\.\d+){3}"

# Tokens that look like device names but never are.
_NOT_DEVICES = {"network", "networks", "segment", "subnet", "loopback", "interface",
                "layer", "step", "scenario", "version", "router", "area"}


@dataclass
class _Iface:
    name: str
    addr: str | None = None
    plen: int | None = None
    sentence: int = 0


@dataclass
class _Device:
    name: str
    node_type: str | None = None
    ifaces: dict[str, _Iface] = field(default_factory=dict)


@dataclass
class _Intent:
    owner: str
    target: str
    through: str | None
    sentence: int


@dataclass
class _ExplicitRoute:
    owner: str
    dest: str
    plen: int
    via: str
    sentence: int


class _Model:
    def __init__(self) -> None:
        self.devices: dict[str, _Device] = {}
        self.assign_events: list[tuple[str, str]] = []  # (device, iface) in bind order
        self.pendings: list[tuple[str, str, int, int]] = []  # dev, addr, plen, sentence
        self.intents: list[_Intent] = []
        self.explicit: list[_ExplicitRoute] = []
        self.routes_mentioned = False
        self.context: str | None = None
        self.facts = 0

    def ensure_device(self, name: str, node_type: str | None = None) -> _Device | None:
        if name.split("-")[0].lower() in _NOT_DEVICES or name.lower() in _NOT_DEVICES:
            return None
        dev = self.devices.get(name)
        if dev is None:
            dev = _Device(name=name)
            self.devices[name] = dev
        if node_type and dev.node_type is None:
            dev.node_type = node_type.lower()
        self.facts += 1
        return dev

    def record_interface(
        self,
        dev_name: str,
        if_name: str,
        addr: str | None,
        plen: int | None,
        sentence: int,
    ) -> None:
        dev = self.ensure_device(dev_name)
        if dev is None:
            return
        iface = dev.ifaces.get(if_name)
        if iface is None:
            iface = _Iface(name=if_name, sentence=sentence)
            dev.ifaces[if_name] = iface
        if addr is not None and iface.addr is None:
            iface.addr = addr
            iface.plen = plen
            self.assign_events.append((dev_name, if_name))
        self.facts += 1


def _normalize(text: str) -> str:
    text = text.replace("“", '"').replace("”", '"')
    text = text.replace("‘", "'").replace("’", "'")
    text = text.replace('"', " ")
    text = " ".join(text.split())

    def _iface_sub(match: re.Match) -> str:
        family = match.group(1).replace(" ", "").lower()
        canonical = "GigabitEthernet" if family in ("gi", "gig", "gigabitethernet") else "FastEthernet"
        return canonical + match.group(2).replace(" ", "")

    text = re.sub(
        r"\b(gigabit\s+ethernet|gigabitethernet|gig|gi|fast\s+ethernet|fastethernet|fa)"
        r"\s*(\d+(?:\s*/\s*\d+)?)\b",
        _iface_sub,
        text,
        flags=re.IGNORECASE,
    )
    text = re.sub(r"\bloopback\s+interface\s+(\d+)\b", r"Loopback\1", text, flags=re.IGNORECASE)
    text = re.sub(r"\bloopback\s*(\d+)\s+interface\b", r"Loopback\1", text, flags=re.IGNORECASE)
    text = re.sub(r"\bloopback\s*(\d+)\b", r"Loopback\1", text, flags=re.IGNORECASE)

    def _mask_sub(match: re.Match) -> str:
        try:
            plen = mask_to_prefix(match.group(2))
        except (NonContiguousMask, ValueError):
            return match.group(0)
        return f"{match.group(1)}/{plen}"

    text = re.sub(
        rf"({_BARE_ADDR})\s+(?:and|with)?\s*(?:a\s+)?subnet\s+mask\s+(?:of\s+)?({_BARE_ADDR})",
        _mask_sub,
        text,
        flags=re.IGNORECASE,
    )
    return text


def _split_sentences(text: str) -> list[str]:
    parts = re.split(r"(?<=[.!?])\s+", text)
    return [part.strip() for part in parts if part.strip()]


_RX = {
    "context": re.compile(rf"^on ({_DEV})\s*,\s*", re.IGNORECASE),
    "pronoun": re.compile(r"^(?:it|this (?:router|device|node))\b", re.IGNORECASE),
    "subject": re.compile(rf"^({_DEV})\b"),
    "decl_as": re.compile(
        rf"\b(?:configure|create|add|set up) (?:a |an )?(router|switch|pc)"
        rf" (?:as|named|called) ({_DEV})",
        re.IGNORECASE,
    ),
    "decl_numbered": re.compile(rf"\b(router|switch|pc) \d+ as ({_DEV})", re.IGNORECASE),
    "decl_is": re.compile(rf"^({_DEV}) (?:is|as) (?:a |an )?(router|switch|pc)\b", re.IGNORECASE),
    "decl_list": re.compile(rf"\brouters?[ :]+((?:{_DEV}(?:'s)?,?\s*(?:and\s+)?)+)", re.IGNORECASE),
    "decl_role": re.compile(
        rf"^({_DEV}) (?:functions|serves|operates|acts) as (?:a |an |the )?(?:\w+ )?router\b",
        re.IGNORECASE,
    ),
    "dev_token": re.compile(rf"{_DEV}"),
    "route_explicit": re.compile(
        rf"\bon ({_DEV}) to (?:reach )?({_ADDR}) via ({_DEV}|{_BARE_ADDR})", re.IGNORECASE
    ),
    "route_reach": re.compile(
        rf"\bon ({_DEV}) to reach(?: to)? ({_DEV})(?: through ({_DEV}))?", re.IGNORECASE
    ),
    "route_between": re.compile(
        rf"\bbetween ({_DEV}) and ({_DEV}).*?static routes? (?:are |is )?"
        rf"(?:set up|configured|set) on both(?: \w+)?(?: through ({_DEV}))?",
        re.IGNORECASE,
    ),
    "route_vice_versa": re.compile(
        rf"\bstatic routes? from ({_DEV}) to ({_DEV}) and vice versa", re.IGNORECASE
    ),
    "iface_full": re.compile(
        rf"({_DEV})(?:'s)? (?:corresponding )?interface,? ({_IF}),?"
        rf" (?:\w+ ){{0,3}}?ip address,? ({_ADDR})",
        re.IGNORECASE,
    ),
    "link_subject": re.compile(
        rf"^({_DEV}) (?:\w+ ){{0,3}}?(?:connect\w*|linke?d?|links|interfaces)"
        rf" (?:back )?(?:directly )?(?:to|with) ({_DEV})"
        rf"(?:,? (?:via|through|using)(?: its)?(?: interface)? ({_IF}))?"
        rf"(?:,? (?:\w+ ){{0,3}}?ip address,? ({_ADDR}))?",
        re.IGNORECASE,
    ),
    "link_more": re.compile(
        rf"\b(?:and )?with ({_DEV}) through(?: interface)? ({_IF})", re.IGNORECASE
    ),
    "iface_on": re.compile(
        rf"^on interface ({_IF}),? ({_DEV}) (?:is )?assigned (?:the )?ip address ({_ADDR})",
        re.IGNORECASE,
    ),
    "iface_configure": re.compile(
        rf"\bconfigure the interface ({_IF}) with ip address ({_ADDR})", re.IGNORECASE
    ),
    "iface_act_as": re.compile(
        rf"\bconfigure ({_IF})(?: interface)? to act as .*?with ip address ({_ADDR})",
        re.IGNORECASE,
    ),
    "iface_has": re.compile(
        rf"^({_DEV}) (?:also )?has (?:a |an )?({_IF}) with ip address ({_ADDR})", re.IGNORECASE
    ),
    "addr_assigned": re.compile(
        rf"\bwith ({_DEV})(?: is)? assigned (?:the )?ip address ({_ADDR})", re.IGNORECASE
    ),
    "addr_possessive": re.compile(
        rf"({_DEV})'s ip address (?:on this interface )?(?:being|set to|is|of)? ?({_ADDR})",
        re.IGNORECASE,
    ),
    "signal": re.compile(rf"{_IF}|{_BARE_ADDR}|\bip address\b|\binterface\b", re.IGNORECASE),
    "route_word": re.compile(r"static rout", re.IGNORECASE),
}


def _split_cidr(token: str) -> tuple[str, int]:
    addr, _, plen = token.partition("/")
    return addr, int(plen)


def rules_convert(text: str) -> Outcome:
    """Convert constrained-English scenario text to an SCS outcome.

    Returns ScsOutcome when the scenario is complete, ClarifyOutcome when
    static routing is mentioned without derivable details, RejectOutcome
    when no network content is recognized at all.
    """
    model = _Model()
    sentences = _split_sentences(_normalize(text))
    for idx, sentence in enumerate(sentences):
        _process_sentence(model, idx, sentence)
    return _finalize(model)


def _process_sentence(model: _Model, idx: int, sentence: str) -> None:
    s = sentence.strip().rstrip(".!?").strip()
    if not s or s == "---":
        return

    ctx = _RX["context"].match(s)
    if ctx:
        dev = model.ensure_device(ctx.group(1))
        if dev:
            model.context = dev.name
        s = s[ctx.end():]

    if _RX["pronoun"].match(s):
        if model.context is None:
            if _RX["signal"].search(s):
                raise UnparsableSentence(idx, sentence, "pronoun with no antecedent")
            return
        s = _RX["pronoun"].sub(model.context, s, count=1)

    subject = None
    sub = _RX["subject"].match(s)
    if sub and sub.group(1).lower() not in _NOT_DEVICES:
        subject = sub.group(1)
        if subject in model.devices or _looks_like_fact(s):
            model.context = subject

    before = model.facts
    handled = _match_routes(model, idx, s)
    _match_devices(model, s)
    scratch_ifaces, scratch_addrs = _match_interfaces(model, idx, s, subject)
    _bind_sentence_addrs(model, idx, scratch_ifaces, scratch_addrs)

    if model.facts == before and not handled and _RX["signal"].search(s):
        raise UnparsableSentence(idx, sentence)


def _looks_like_fact(s: str) -> bool:
    return bool(_RX["signal"].search(s)) or bool(
        re.search(r"\b(?:router|connect|linked|links|interfaces)\b", s, re.IGNORECASE)
    )


def _match_routes(model: _Model, idx: int, s: str) -> bool:
    if not _RX["route_word"].search(s):
        return False
    model.routes_mentioned = True
    for owner, dest, via in _RX["route_explicit"].findall(s):
        addr, plen = _split_cidr(dest)
        model.explicit.append(_ExplicitRoute(owner, addr, plen, via, idx))
        model.ensure_device(owner)
    for owner, target, through in _RX["route_reach"].findall(s):
        model.intents.append(_Intent(owner, target, through or None, idx))
        model.ensure_device(owner)
        model.ensure_device(target)
    between = _RX["route_between"].search(s)
    if between:
        a, b, through = between.group(1), between.group(2), between.group(3)
        model.intents.append(_Intent(a, b, through, idx))
        model.intents.append(_Intent(b, a, through, idx))
    vice = _RX["route_vice_versa"].search(s)
    if vice:
        a, b = vice.group(1), vice.group(2)
        model.intents.append(_Intent(a, b, None, idx))
        model.intents.append(_Intent(b, a, None, idx))
    return True


def _match_devices(model: _Model, s: str) -> None:
    for node_type, name in _RX["decl_as"].findall(s):
        model.ensure_device(name, node_type)
        model.context = name
    for node_type, name in _RX["decl_numbered"].findall(s):
        model.ensure_device(name, node_type)
        model.context = name
    decl = _RX["decl_is"].match(s)
    if decl:
        model.ensure_device(decl.group(1), decl.group(2))
    listed = _RX["decl_list"].search(s)
    if listed:
        for name in _RX["dev_token"].findall(listed.group(1)):
            model.ensure_device(name, "router")
    role = _RX["decl_role"].match(s)
    if role:
        model.ensure_device(role.group(1), "router")


def _match_interfaces(
    model: _Model, idx: int, s: str, subject: str | None
) -> tuple[list[tuple[str, str]], list[tuple[str, str]]]:
    """Collect interface and address facts; returns sentence-local
    (device, iface) mentions and unbound (device, addr) assignments."""
    ifaces: list[tuple[str, str]] = []
    addrs: list[tuple[str, str]] = []

    link = _RX["link_subject"].match(s)
    if link:
        owner, other, if_name, addr = link.group(1), link.group(2), link.group(3), link.group(4)
        model.ensure_device(other)
        if if_name:
            if addr:
                a, plen = _split_cidr(addr)
                model.record_interface(owner, if_name, a, plen, idx)
            else:
                model.record_interface(owner, if_name, None, None, idx)
                ifaces.append((owner, if_name))
        else:
            model.ensure_device(owner)
        for other2, if2 in _RX["link_more"].findall(s):
            model.ensure_device(other2)
            model.record_interface(owner, if2, None, None, idx)
            ifaces.append((owner, if2))

    for dev, if_name, addr in _RX["iface_full"].findall(s):
        a, plen = _split_cidr(addr)
        model.record_interface(dev, if_name, a, plen, idx)

    on = _RX["iface_on"].match(s)
    if on:
        a, plen = _split_cidr(on.group(3))
        model.record_interface(on.group(2), on.group(1), a, plen, idx)

    for if_name, addr in _RX["iface_configure"].findall(s):
        if model.context is None:
            raise UnparsableSentence(idx, s, "interface statement without a device context")
        a, plen = _split_cidr(addr)
        model.record_interface(model.context, if_name, a, plen, idx)

    for if_name, addr in _RX["iface_act_as"].findall(s):
        if model.context is None:
            raise UnparsableSentence(idx, s, "interface statement without a device context")
        a, plen = _split_cidr(addr)
        model.record_interface(model.context, if_name, a, plen, idx)

    has = _RX["iface_has"].match(s)
    if has:
        a, plen = _split_cidr(has.group(3))
        model.record_interface(has.group(1), has.group(2), a, plen, idx)

    for dev, addr in _RX["addr_assigned"].findall(s):
        addrs.append((dev, addr))
    for dev, addr in _RX["addr_possessive"].findall(s):
        addrs.append((dev, addr))
    return ifaces, addrs


def _bind_sentence_addrs(
    model: _Model,
    idx: int,
    ifaces: list[tuple[str, str]],
    addrs: list[tuple[str, str]],
) -> None:
    for dev_name, addr in addrs:
        a, plen = _split_cidr(addr)
        dev = model.devices.get(dev_name)
        if dev is not None:
            candidates = [
                if_name
                for owner, if_name in ifaces
                if owner == dev_name and dev.ifaces[if_name].addr is None
            ]
            if len(candidates) == 1:
                model.record_interface(dev_name, candidates[0], a, plen, idx)
                continue
            if any(i.addr == a and i.plen == plen for i in dev.ifaces.values()):
                continue  # same fact stated twice
        model.ensure_device(dev_name)
        model.pendings.append((dev_name, a, plen, idx))


def _finalize(model: _Model) -> Outcome:
    if not model.devices:
        return RejectOutcome(
            "The input does not describe a recognizable network scenario."
            " Please describe devices, interfaces and addresses."
        )

    for dev_name, addr, plen, sidx in model.pendings:
        dev = model.devices.get(dev_name)
        if dev is None:
            continue
        unbound = [i for i in dev.ifaces.values() if i.addr is None]
        if len(unbound) == 1:
            unbound[0].addr = addr
            unbound[0].plen = plen
            model.assign_events.append((dev_name, unbound[0].name))
        else:
            raise UnparsableSentence(
                sidx, f"{dev_name} {addr}/{plen}", "cannot attach address to an interface"
            )

    for dev in model.devices.values():
        if dev.node_type is None:
            dev.node_type = "router"
        for iface in dev.ifaces.values():
            if iface.addr is None:
                raise UnparsableSentence(
                    iface.sentence,
                    f"{dev.name}.{iface.name}",
                    "interface mentioned but never given an address",
                )

    links = _build_links(model)
    routes = _derive_routes(model, links)
    if routes is None:
        return ClarifyOutcome(static_route_question())
    if model.routes_mentioned and not routes:
        return ClarifyOutcome(static_route_question())

    return ScsOutcome(scs_text=_emit(model, links, routes))


def _build_links(model: _Model) -> list[tuple[tuple[str, str], tuple[str, str]]]:
    """Pair non-loopback interfaces that share a subnet, in address-bind
    order, into point-to-point links."""
    links = []
    by_subnet: dict[tuple[int, int, int], tuple[str, str]] = {}
    for dev_name, if_name in model.assign_events:
        iface = model.devices[dev_name].ifaces[if_name]
        if iface.name.startswith("Loopback"):
            continue
        octets = [int(part) for part in iface.addr.split(".")]
        if any(o > 255 for o in octets) or not 0 <= iface.plen <= 32:
            continue  # let the validator report it
        value = (octets[0] << 24) | (octets[1] << 16) | (octets[2] << 8) | octets[3]
        mask = (0xFFFFFFFF << (32 - iface.plen)) & 0xFFFFFFFF if iface.plen else 0
        key = (value & mask, iface.plen, 0)
        if key in by_subnet:
            first = by_subnet[key]
            if first[0] != dev_name:
                links.append(tuple(sorted((first, (dev_name, if_name)))))
        else:
            by_subnet[key] = (dev_name, if_name)
    return links


def _derive_routes(
    model: _Model, links: list[tuple[tuple[str, str], tuple[str, str]]]
) -> list[tuple[str, str, int, str]] | None:
    """Concrete routes (owner, dest, plen, via) from explicit statements
    and reach-intents. None means a clarification is needed."""
    neighbors: dict[str, list[str]] = {}
    for (dev_a, _), (dev_b, _) in links:
        neighbors.setdefault(dev_a, []).append(dev_b)
        neighbors.setdefault(dev_b, []).append(dev_a)

    routes: list[tuple[str, str, int, str]] = []

    def add(owner: str, dest: str, plen: int, via: str) -> None:
        entry = (owner, dest, plen, via)
        if entry not in routes:
            routes.append(entry)

    for explicit in model.explicit:
        add(explicit.owner, explicit.dest, explicit.plen, explicit.via)

    for intent in model.intents:
        if intent.owner == intent.target:
            continue
        path = _bfs(neighbors, intent.owner, intent.target)
        if path is None:
            return None
        dest_nets = _destination_networks(model, intent.target)
        if not dest_nets:
            return None
        for pos in range(len(path) - 1):
            node, nxt = path[pos], path[pos + 1]
            for dest, plen in dest_nets:
                if _connected_to(model, node, dest, plen):
                    continue
                add(node, dest, plen, nxt)
    return routes


def _bfs(neighbors: dict[str, list[str]], start: str, goal: str) -> list[str] | None:
    if start not in neighbors:
        return None
    queue = [[start]]
    seen = {start}
    while queue:
        path = queue.pop(0)
        if path[-1] == goal:
            return path
        for nxt in neighbors.get(path[-1], []):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(path + [nxt])
    return None


def _subnet_of(iface: _Iface) -> tuple[str, int] | None:
    octets = [int(part) for part in iface.addr.split(".")]
    if any(o > 255 for o in octets) or not 0 <= iface.plen <= 32:
        return None
    value = (octets[0] << 24) | (octets[1] << 16) | (octets[2] << 8) | octets[3]
    mask = (0xFFFFFFFF << (32 - iface.plen)) & 0xFFFFFFFF if iface.plen else 0
    net = value & mask
    text = ".".join(str((net >> shift) & 0xFF) for shift in (24, 16, 8, 0))
    return text, iface.plen


def _destination_networks(model: _Model, target: str) -> list[tuple[str, int]]:
    """Networks a route toward ``target`` should cover: its internal
    (loopback) networks when it has any, its connected subnets otherwise."""
    dev = model.devices.get(target)
    if dev is None:
        return []
    loopbacks = [i for i in dev.ifaces.values() if i.name.startswith("Loopback")]
    pool = loopbacks or list(dev.ifaces.values())
    nets = []
    for iface in pool:
        subnet = _subnet_of(iface)
        if subnet is not None and subnet not in nets:
            nets.append(subnet)
    return sorted(nets)


def _connected_to(model: _Model, dev_name: str, dest: str, plen: int) -> bool:
    dev = model.devices[dev_name]
    for iface in dev.ifaces.values():
        if _subnet_of(iface) == (dest, plen):
            return True
    return False


def _emit(
    model: _Model,
    links: list[tuple[tuple[str, str], tuple[str, str]]],
    routes: list[tuple[str, str, int, str]],
) -> str:
    lines = []
    for dev in model.devices.values():
        lines.append(f"{dev.name}: type {dev.node_type}")
        for iface in dev.ifaces.values():
            lines.append(f"{dev.name}: interface {iface.name} ip {iface.addr}/{iface.plen}")
        for owner, dest, plen, via in routes:
            if owner == dev.name:
                lines.append(f"{dev.name}: static_route {dest}/{plen} via {via}")
    for (dev_a, if_a), (dev_b, if_b) in links:
        lines.append(f"{dev_a},{dev_b}: {dev_a}.{if_a} <-> {dev_b}.{if_b}")
    return "\n".join(lines) + "\n"
