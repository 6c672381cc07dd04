"""Parser for the line-oriented scenario format.

A scenario is a sequence of declarations and tasks.  A declaration header
starts in column 0; indented lines that follow belong to it.  ``#`` starts a
comment.  Example::

    base arrow
      object a
      object b
      arrow u : a -> b

    presheaf X on arrow
      at a : 0 1
      at b : 0
      restrict u : 0->1

    subterminal U on arrow : a
    functor F : finset -> finset = builtin:square
    functor phi : arrow -> arrow
      obj a -> a
      obj b -> b
      arr u -> u
    nat psi : F => Id = builtin:proj0
    task pullback-representation arrow U=U

Builtin toposes are ``finset``, ``finset2`` and ``sierpinski``; a declared
base ``B`` also names its presheaf topos.  A tabled functor ``φ: B1 -> B2``
denotes restriction along ``φ``, the lex functor ``Psh(B2) -> Psh(B1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

from .category import LexFunctor, NatTrans, const_terminal, identity_functor
from .errors import ArtinGlueError, LawViolation, ParseError, ShapeMismatch, UnresolvedName
from .finset import FinSet
from . import fixtures as fx
from .presheaf import FiniteBaseCategory, Presheaf, PresheafTopos

BUILTIN_FUNCTORS = ("identity", "const_terminal", "square", "diagonal", "proj0", "proj1", "open_E", "closed_Kstar", "glue_pi1", "glue_pi2")
BUILTIN_NATS = ("identity", "bang", "diag", "proj0", "proj1", "swap")
TASK_KINDS = (
    "subterminals",
    "adjunction",
    "glue",
    "pullback-representation",
    "kernel-cokernel",
    "phi",
    "extension",
    "roundtrip",
    "lifts",
    "hom-bijection",
    "collation",
    "baer",
    "laws",
    "zero",
)


@dataclass
class Task:
    kind: str
    args: list
    options: dict
    line: int
    text: str


@dataclass
class Scenario:
    toposes: dict = field(default_factory=dict)
    bases: dict = field(default_factory=dict)
    presheaves: dict = field(default_factory=dict)
    subterminals: dict = field(default_factory=dict)
    functors: dict = field(default_factory=dict)
    nats: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)

    def topos(self, name: str, line: int = 0, col: int = 0) -> PresheafTopos:
        if name in self.toposes:
            return self.toposes[name]
        raise UnresolvedName(f"unknown topos or base {name!r}", line, col)


def _atom(tok: str):
    if re.fullmatch(r"-?\d+", tok):
        return int(tok)
    return tok


class _Lines:
    def __init__(self, text: str):
        self.items = []
        for i, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].rstrip()
            if not body.strip():
                continue
            indent = len(body) - len(body.lstrip())
            self.items.append((i, indent, body.strip(), raw))
        self.pos = 0

    def next_header(self):
        if self.pos >= len(self.items):
            return None
        item = self.items[self.pos]
        self.pos += 1
        if item[1] != 0:
            raise ParseError("indented line outside a declaration", item[0], item[1] + 1)
        return item

    def body(self) -> list:
        out = []
        while self.pos < len(self.items) and self.items[self.pos][1] > 0:
            out.append(self.items[self.pos])
            self.pos += 1
        return out


def _col(raw: str, token: str) -> int:
    idx = raw.find(token)
    return idx + 1 if idx >= 0 else 1


def parse_scenario(text: str) -> Scenario:
    sc = Scenario()
    sc.toposes.update(fx.TOPOSES)
    for name, topos in fx.TOPOSES.items():
        sc.bases[name] = topos.base
    sc.functors.update(
        {
            "Id": fx.builtin_functor("identity"),
            "One": fx.builtin_functor("const_terminal"),
            "Sq": fx.builtin_functor("square"),
            "id_finset": fx.builtin_functor("identity"),
        }
    )
    sc.nats.update(
        {
            "bang": fx.bang(fx.builtin_functor("identity")),
            "diag": fx.diag_nat(),
            "proj0": fx.proj_nat(0),
            "proj1": fx.proj_nat(1),
            "swap": fx.swap_nat(),
        }
    )
    lines = _Lines(text)
    while True:
        header = lines.next_header()
        if header is None:
            break
        lineno, _, body, raw = header
        keyword = body.split()[0]
        handler = _HANDLERS.get(keyword)
        if handler is None:
            raise ParseError(f"unknown declaration {keyword!r}", lineno, 1)
        handler(sc, lineno, body, raw, lines.body())
    return sc


def _parse_base(sc: Scenario, lineno, body, raw, block):
    parts = body.split()
    if len(parts) != 2:
        raise ParseError("expected: base NAME", lineno, 1)
    name = parts[1]
    if name in sc.toposes:
        raise ParseError(f"name {name!r} is already declared", lineno, _col(raw, name))
    objects, arrows, compose = [], [], {}
    for ln, indent, text, raw_line in block:
        m = re.fullmatch(r"object\s+(\S+)", text)
        if m:
            objects.append(m.group(1))
            continue
        m = re.fullmatch(r"arrow\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)", text)
        if m:
            arrows.append((m.group(1), m.group(2), m.group(3)))
            continue
        m = re.fullmatch(r"compose\s+(\S+)\s*\.\s*(\S+)\s*=\s*(\S+)", text)
        if m:
            compose[(m.group(1), m.group(2))] = m.group(3)
            continue
        raise ParseError(f"cannot read base line {text!r}", ln, indent + 1)
    for a, s, t in arrows:
        for end in (s, t):
            if end not in objects:
                raise UnresolvedName(f"arrow {a} refers to unknown object {end!r}", lineno, 1)
    try:
        base = FiniteBaseCategory(name, objects, arrows, compose)
    except ShapeMismatch as exc:
        raise LawViolation(f"base {name}: {exc}", lineno, 1) from exc
    sc.bases[name] = base
    sc.toposes[name] = PresheafTopos(base, name=f"Psh({name})")


def _parse_presheaf(sc: Scenario, lineno, body, raw, block):
    m = re.fullmatch(r"presheaf\s+(\S+)\s+on\s+(\S+)", body)
    if not m:
        raise ParseError("expected: presheaf NAME on BASE", lineno, 1)
    name, tname = m.groups()
    topos = sc.topos(tname, lineno, _col(raw, tname))
    at, res = {}, {}
    for ln, indent, text, raw_line in block:
        mm = re.fullmatch(r"at\s+(\S+)\s*:(.*)", text)
        if mm:
            obj = mm.group(1)
            if obj not in topos.base.objects:
                raise UnresolvedName(f"unknown base object {obj!r}", ln, _col(raw_line, obj))
            at[obj] = FinSet.of(_atom(t) for t in mm.group(2).split())
            continue
        mm = re.fullmatch(r"restrict\s+(\S+)\s*:(.*)", text)
        if mm:
            arr = mm.group(1)
            if arr not in topos.base.non_identity:
                raise UnresolvedName(f"unknown base arrow {arr!r}", ln, _col(raw_line, arr))
            table = {}
            for pair in mm.group(2).split():
                if "->" not in pair:
                    raise ParseError(f"expected x->y, got {pair!r}", ln, _col(raw_line, pair))
                x, y = pair.split("->", 1)
                table[_atom(x)] = _atom(y)
            res[arr] = table
            continue
        raise ParseError(f"cannot read presheaf line {text!r}", ln, indent + 1)
    for obj in topos.base.objects:
        at.setdefault(obj, FinSet(()))
    for arr in topos.base.non_identity:
        if arr not in res:
            raise UnresolvedName(f"presheaf {name}: no restriction along {arr}", lineno, 1)
    try:
        sc.presheaves[name] = (tname, topos.presheaf(at, res))
    except (ShapeMismatch, KeyError) as exc:
        raise LawViolation(f"presheaf {name}: {exc}", lineno, 1) from exc


def _parse_subterminal(sc: Scenario, lineno, body, raw, block):
    m = re.fullmatch(r"subterminal\s+(\S+)\s+on\s+(\S+)\s*:(.*)", body)
    if not m:
        raise ParseError("expected: subterminal NAME on BASE : OBJECTS", lineno, 1)
    name, tname, rest = m.groups()
    topos = sc.topos(tname, lineno, _col(raw, tname))
    support = rest.split()
    for o in support:
        if o not in topos.base.objects:
            raise UnresolvedName(f"unknown base object {o!r}", lineno, _col(raw, o))
    try:
        sc.subterminals[name] = (tname, topos.subterminal(support))
    except ArtinGlueError as exc:
        raise LawViolation(f"subterminal {name}: {exc}", lineno, 1) from exc


def _parse_functor(sc: Scenario, lineno, body, raw, block):
    m = re.fullmatch(r"functor\s+(\S+)\s*:\s*(\S+)\s*->\s*(\S+)(?:\s*=\s*builtin:(\S+)(.*))?", body)
    if not m:
        raise ParseError("expected: functor NAME : SRC -> TGT [= builtin:KIND ARGS]", lineno, 1)
    name, src, tgt, kind, rest = m.groups()
    if name in sc.functors:
        raise ParseError(f"functor {name!r} is already declared", lineno, _col(raw, name))
    if kind is not None:
        sc.functors[name] = _builtin_functor(sc, name, src, tgt, kind, (rest or "").split(), lineno, raw)
        return
    if src not in sc.bases or tgt not in sc.bases:
        missing = src if src not in sc.bases else tgt
        raise UnresolvedName(f"unknown base {missing!r}", lineno, _col(raw, missing))
    B1, B2 = sc.bases[src], sc.bases[tgt]
    on_obj, on_arr = {}, {}
    for ln, indent, text, raw_line in block:
        mm = re.fullmatch(r"(obj|arr)\s+(\S+)\s*->\s*(\S+)", text)
        if not mm:
            raise ParseError(f"cannot read functor line {text!r}", ln, indent + 1)
        which, a, b = mm.groups()
        if which == "obj":
            if a not in B1.objects or b not in B2.objects:
                raise UnresolvedName(f"unknown object in {text!r}", ln, indent + 1)
            on_obj[a] = b
        else:
            if a not in B1.arrows or b not in B2.arrows:
                raise UnresolvedName(f"unknown arrow in {text!r}", ln, indent + 1)
            on_arr[a] = b
    for o in B1.objects:
        if o not in on_obj:
            raise UnresolvedName(f"functor {name}: no assignment for object {o}", lineno, 1)
    for a in B1.non_identity:
        if a not in on_arr:
            raise UnresolvedName(f"functor {name}: no assignment for arrow {a}", lineno, 1)
    for a in B1.non_identity:
        b = on_arr[a]
        if B2.src[b] != on_obj[B1.src[a]] or B2.tgt[b] != on_obj[B1.tgt[a]]:
            raise LawViolation(f"functor {name}: arrow {a} is sent to {b} with the wrong ends", lineno, 1)
    full = dict(on_arr)
    for o in B1.objects:
        full[B1.ids[o]] = B2.ids[on_obj[o]]
    for (g, f), h in B1.table.items():
        if B2.compose(full[g], full[f]) != full[h]:
            raise LawViolation(f"functor {name}: does not preserve {g} ∘ {f}", lineno, 1)
    F = fx.restriction_functor(sc.toposes[tgt], sc.toposes[src], on_obj, on_arr, name=name)
    sc.functors[name] = F


def _builtin_functor(sc: Scenario, name, src, tgt, kind, args, lineno, raw) -> LexFunctor:
    if kind not in BUILTIN_FUNCTORS:
        raise UnresolvedName(f"unknown builtin functor {kind!r}", lineno, _col(raw, kind))
    if kind in ("open_E", "closed_Kstar"):
        if len(args) != 1 or args[0] not in sc.subterminals:
            raise UnresolvedName(f"builtin:{kind} needs a declared subterminal", lineno, _col(raw, kind))
        from .subtopos import closed_reflection, open_reflection

        tname, U = sc.subterminals[args[0]]
        topos = sc.toposes[tname]
        return open_reflection(topos, U).E if kind == "open_E" else closed_reflection(topos, U).K_star
    if kind in ("glue_pi1", "glue_pi2"):
        if len(args) != 1 or args[0] not in sc.functors:
            raise UnresolvedName(f"builtin:{kind} needs a declared functor", lineno, _col(raw, kind))
        from .glueing import glue_construct

        glue = glue_construct(sc.functors[args[0]])
        return glue.pi1 if kind == "glue_pi1" else glue.pi2
    s, t = sc.topos(src, lineno, _col(raw, src)), sc.topos(tgt, lineno, _col(raw, tgt))
    if kind == "identity":
        if s is not t:
            raise LawViolation("builtin:identity needs equal source and target", lineno, 1)
        return fx.builtin_functor("identity") if s is fx.FINSET else identity_functor(s)
    if kind == "const_terminal":
        return fx.builtin_functor("const_terminal") if (s is fx.FINSET and t is fx.FINSET) else const_terminal(s, t)
    if kind == "square":
        if s is not t:
            raise LawViolation("builtin:square needs equal source and target", lineno, 1)
        return fx.builtin_functor("square") if s is fx.FINSET else fx.square_functor(s)
    if kind == "diagonal":
        if s is not fx.FINSET or t is not fx.FINSET2:
            raise LawViolation("builtin:diagonal runs finset -> finset2", lineno, 1)
        return fx.builtin_functor("diagonal")
    if s is not fx.FINSET2 or t is not fx.FINSET:
        raise LawViolation(f"builtin:{kind} runs finset2 -> finset", lineno, 1)
    return fx.builtin_functor(kind)


def _parse_nat(sc: Scenario, lineno, body, raw, block):
    m = re.fullmatch(r"nat\s+(\S+)\s*:\s*(\S+)\s*=>\s*(\S+)\s*=\s*builtin:(\S+)", body)
    if not m:
        raise ParseError("expected: nat NAME : F => G = builtin:KIND", lineno, 1)
    name, f, g, kind = m.groups()
    for fn in (f, g):
        if fn not in sc.functors:
            raise UnresolvedName(f"unknown functor {fn!r}", lineno, _col(raw, fn))
    if kind not in BUILTIN_NATS:
        raise UnresolvedName(f"unknown builtin transformation {kind!r}", lineno, _col(raw, kind))
    F, G = sc.functors[f], sc.functors[g]
    topos = F.source
    if kind == "identity":
        if F is not G:
            raise LawViolation("builtin:identity needs F = G", lineno, 1)
        nat = NatTrans(F, F, lambda x: F.target.identity(F.obj(x)), name=name)
    elif kind == "bang":
        tgt = G.target
        if not tgt.is_terminal(G.obj(G.source.initial())):
            raise LawViolation("builtin:bang needs a constant-terminal target", lineno, 1)
        nat = NatTrans(F, G, lambda x: tgt.unique_to(F.obj(x), G.obj(x)), name=name)
    elif kind in ("diag", "proj0", "proj1", "swap"):
        if topos is not fx.FINSET:
            raise LawViolation(f"builtin:{kind} is defined on finset", lineno, 1)
        proto = {"diag": fx.diag_nat, "proj0": lambda: fx.proj_nat(0), "proj1": lambda: fx.proj_nat(1), "swap": fx.swap_nat}[kind]()
        if proto.source is not F or proto.target is not G:
            raise LawViolation(
                f"builtin:{kind} runs {proto.source.name} => {proto.target.name}, not {F.name} => {G.name}", lineno, 1
            )
        nat = proto
    sc.nats[name] = nat


def _parse_task(sc: Scenario, lineno, body, raw, block):
    if block:
        raise ParseError("task lines take no indented body", block[0][0], block[0][1] + 1)
    main, _, clause = body.partition(";")
    parts = main.split()[1:]
    clause_parts = clause.split()
    if clause_parts:
        if clause_parts[0] != "check" or len(clause_parts) < 2:
            raise ParseError("expected '; check [adjunction] WHAT'", lineno, _col(raw, ";") + 1)
        parts.append("check=" + clause_parts[-1])
    if not parts:
        raise ParseError("expected: task KIND ARGS", lineno, 1)
    kind = parts[0]
    if kind not in TASK_KINDS:
        raise ParseError(f"unknown task kind {kind!r}", lineno, _col(raw, kind))
    args, options = [], {}
    for tok in parts[1:]:
        if "=" in tok:
            k, v = tok.split("=", 1)
            options[k] = v
        else:
            args.append(tok)
    task = Task(kind, args, options, lineno, body[len("task"):].strip())
    _validate_task(sc, task, raw)
    sc.tasks.append(task)


def _validate_task(sc: Scenario, task: Task, raw: str) -> None:
    """Resolve every name a task mentions before anything runs."""
    names: list = []
    kind = task.kind
    if kind in ("subterminals", "pullback-representation", "kernel-cokernel", "phi", "extension"):
        names = [("topos", a) for a in task.args[:1]]
    elif kind == "adjunction":
        names = [("topos", a) for a in task.args[1:2]]
        if not task.args or task.args[0] not in ("open", "closed", "pi1", "pi2", "psi"):
            raise ParseError("adjunction needs open|closed|pi1|pi2|psi", task.line, _col(raw, "adjunction"))
        if task.args[0] in ("pi1", "pi2"):
            names = [("functor", a) for a in task.args[1:2]]
        if task.args[0] == "psi":
            names = [("nat", a) for a in task.args[1:2]]
    elif kind in ("glue", "lifts", "laws", "zero", "collation"):
        names = [("functor", a) for a in task.args[:1]]
    elif kind == "hom-bijection":
        names = [("functor", a) for a in task.args[:2]]
    elif kind == "roundtrip":
        if "psi" in task.options:
            names = [("nat", task.options["psi"])]
    elif kind == "baer":
        what = task.args[0] if task.args else ""
        if what == "coproduct":
            names = [("functor", a) for a in task.args[1:3]]
        elif what == "coequalizer":
            names = [("nat", a) for a in task.args[1:3]]
        else:
            raise ParseError("baer needs coproduct|coequalizer", task.line, _col(raw, "baer"))
    for key in ("T", "S"):
        if key in task.options:
            names.append(("functor", task.options[key]))
    if "U" in task.options and not task.options["U"].startswith("("):
        if task.options["U"] not in sc.subterminals and task.options["U"] not in ("0", "1"):
            raise UnresolvedName(f"unknown subterminal {task.options['U']!r}", task.line, _col(raw, "U="))
    tables = {"topos": sc.toposes, "functor": sc.functors, "nat": sc.nats}
    for what, n in names:
        if n not in tables[what]:
            raise UnresolvedName(f"unknown {what} {n!r}", task.line, _col(raw, n))


_HANDLERS = {
    "base": _parse_base,
    "presheaf": _parse_presheaf,
    "subterminal": _parse_subterminal,
    "functor": _parse_functor,
    "nat": _parse_nat,
    "task": _parse_task,
}


def resolve_subterminal(sc: Scenario, topos: PresheafTopos, given: str | None, line: int = 0) -> Any:
    """``given`` is a declared name, ``0``/``1``, or a 0/1 tuple aligned with the base objects."""
    if given is None:
        raise UnresolvedName("task needs U=...", line, 1)
    if given in sc.subterminals:
        tname, U = sc.subterminals[given]
        if sc.toposes[tname] is not topos:
            raise UnresolvedName(f"subterminal {given} lives on {tname}", line, 1)
        return U
    if given == "0":
        return topos.initial()
    if given == "1":
        return topos.terminal()
    m = re.fullmatch(r"\(([01](?:\s*,\s*[01])*)\)", given)
    if not m:
        raise ParseError(f"cannot read subterminal {given!r}", line, 1)
    bits = [int(b) for b in m.group(1).split(",")]
    objs = topos.base.objects
    if len(bits) != len(objs):
        raise ParseError(f"subterminal pattern needs {len(objs)} entries", line, 1)
    return topos.subterminal([o for o, b in zip(objs, bits) if b])


def presheaves_on(sc: Scenario, topos: PresheafTopos) -> list:
    return [p for tname, p in sc.presheaves.values() if sc.toposes[tname] is topos]
