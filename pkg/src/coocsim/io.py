"""Text formats: rule and matrix files, edge lists, CSV reports, snapshots.

Rule files are blocks of three lines::

    interaction <name>
    actions <movement-action> <deactivation-action>
    end

Matrix files hold one entry per line, four mandatory fields plus an
optional target/distance pair::

    source-family interaction-name priority cardinality [target-family distance]

Edge lists hold one unordered ``name name`` pair per line. Lines starting
with ``;`` (rules, matrix) or ``#`` (edge lists) are comments; blank lines
are ignored everywhere. Reports are written as ``population,count`` CSV
with a trailing ``_average`` row, snapshots as binary P6 pixmaps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .metrics import NeighborhoodReport
from .model import (
    DEACTIVATE_NONE,
    DEACTIVATE_SOURCE,
    DEACTIVATION_ACTIONS,
    FOLLOW_PATH,
    MOVEMENT_ACTIONS,
    RANDOM_WALK,
    InteractionMatrixEntry,
    InteractionRule,
)
from .world import WorldState

MATRIX_HEADER = "; source-family interaction-name priority cardinality <target-family distance>"

#: Rule vocabulary emitted by the relation-set generator.
WALK_RULE = InteractionRule("walk", RANDOM_WALK, DEACTIVATE_NONE)
COOC_RULE = InteractionRule("cooc", FOLLOW_PATH, DEACTIVATE_SOURCE)

#: Population colours for snapshots, assigned by population index (wrapping).
PALETTE: tuple[tuple[int, int, int], ...] = (
    (230, 25, 75), (0, 130, 200), (60, 180, 75), (255, 225, 25),
    (245, 130, 48), (145, 30, 180), (70, 240, 240), (240, 50, 230),
    (210, 245, 60), (250, 190, 212), (0, 128, 128), (220, 190, 255),
    (170, 110, 40), (255, 250, 200), (128, 0, 0), (170, 255, 195),
)


class ParseError(ValueError):
    """A rejected input line; ``line_no`` is 1-based."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _content_lines(text: str, comment: str) -> Iterable[tuple[int, list[str]]]:
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(comment):
            continue
        yield line_no, stripped.split()


def parse_rules(text: str) -> list[InteractionRule]:
    rules: list[InteractionRule] = []
    expect = "interaction"
    name = movement = deactivation = None
    last_line = 0
    for line_no, tokens in _content_lines(text, ";"):
        last_line = line_no
        if expect == "interaction":
            if tokens[0] != "interaction" or len(tokens) != 2:
                raise ParseError(line_no, f"expected 'interaction <name>', got {' '.join(tokens)!r}")
            name = tokens[1]
            expect = "actions"
        elif expect == "actions":
            if tokens[0] != "actions" or len(tokens) != 3:
                raise ParseError(line_no, f"expected 'actions <movement> <deactivation>', got {' '.join(tokens)!r}")
            movement, deactivation = tokens[1], tokens[2]
            if movement not in MOVEMENT_ACTIONS:
                raise ParseError(line_no, f"unknown movement action {movement!r}")
            if deactivation not in DEACTIVATION_ACTIONS:
                raise ParseError(line_no, f"unknown deactivation action {deactivation!r}")
            expect = "end"
        else:
            if tokens != ["end"]:
                raise ParseError(line_no, f"expected 'end', got {' '.join(tokens)!r}")
            rules.append(InteractionRule(name, movement, deactivation))
            expect = "interaction"
    if expect != "interaction":
        raise ParseError(last_line, "unterminated interaction block")
    return rules


def parse_matrix(text: str) -> list[InteractionMatrixEntry]:
    entries: list[InteractionMatrixEntry] = []
    for line_no, tokens in _content_lines(text, ";"):
        if len(tokens) not in (4, 6):
            raise ParseError(line_no, f"expected 4 or 6 fields, got {len(tokens)}")
        source, rule = tokens[0], tokens[1]
        try:
            priority = int(tokens[2])
        except ValueError:
            raise ParseError(line_no, f"priority must be an integer, got {tokens[2]!r}") from None
        try:
            cardinality = int(tokens[3])
        except ValueError:
            raise ParseError(line_no, f"cardinality must be an integer, got {tokens[3]!r}") from None
        target = distance = None
        if len(tokens) == 6:
            target = tokens[4]
            try:
                distance = float(tokens[5])
            except ValueError:
                raise ParseError(line_no, f"distance must be a number, got {tokens[5]!r}") from None
        entries.append(InteractionMatrixEntry(source, rule, priority, cardinality, target, distance))
    return entries


def format_rules(rules: Sequence[InteractionRule]) -> str:
    blocks = [
        f"interaction {r.name}\nactions {r.movement_action} {r.deactivation_action}\nend\n"
        for r in rules
    ]
    return "\n".join(blocks)


def format_matrix(entries: Sequence[InteractionMatrixEntry], header: bool = True) -> str:
    lines = [MATRIX_HEADER] if header else []
    for e in entries:
        line = f"{e.source_family} {e.interaction_name} {e.priority} {e.cardinality}"
        if e.target_family is not None:
            line += f" {e.target_family} {e.distance:g}"
        lines.append(line)
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EdgeList:
    """Deduplicated unordered co-occurrence pairs, self-loops dropped."""

    edges: tuple[tuple[str, str], ...]

    @property
    def names(self) -> tuple[str, ...]:
        seen = set()
        for a, b in self.edges:
            seen.add(a)
            seen.add(b)
        return tuple(sorted(seen))

    def neighbors(self, name: str) -> set[str]:
        out = set()
        for a, b in self.edges:
            if a == name:
                out.add(b)
            elif b == name:
                out.add(a)
        return out


def parse_edge_list(text: str) -> EdgeList:
    edges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()
    for line_no, tokens in _content_lines(text, "#"):
        if len(tokens) != 2:
            raise ParseError(line_no, f"expected two names, got {len(tokens)} fields")
        a, b = tokens
        if a == b:
            continue  # self-relations carry no aggregation signal
        pair = (a, b) if a < b else (b, a)
        if pair not in seen:
            seen.add(pair)
            edges.append(pair)
    return EdgeList(tuple(edges))


@dataclass(frozen=True)
class RelationModel:
    """Populations plus generated rules and matrix for one relation context."""

    populations: tuple[str, ...]
    rules: tuple[InteractionRule, ...]
    matrix: tuple[InteractionMatrixEntry, ...]

    @property
    def relation_count(self) -> int:
        return sum(1 for e in self.matrix if e.target_family is not None)


def build_relation_model(
    edges: EdgeList,
    target: str,
    kind: str = "restricted",
    distance: float = 2.0,
    symmetric: bool = False,
) -> RelationModel:
    """Build the population and relation context around a target name.

    ``restricted`` keeps only the target and its direct neighbours, with one
    follow-path entry per incident edge. ``extended`` widens to two hops and
    keeps every edge among the retained names. Every population also gets a
    plain walk entry. Each edge yields one directed entry with the
    lexicographically smaller name as source, or both directions when
    ``symmetric`` is set.
    """
    if kind not in ("restricted", "extended"):
        raise ValueError(f"kind must be 'restricted' or 'extended', got {kind!r}")
    names = set(edges.names)
    if target not in names:
        raise ValueError(f"target {target!r} not present in the edge list")
    first_hop = edges.neighbors(target)
    if kind == "restricted":
        kept = {target} | first_hop
        kept_edges = [e for e in edges.edges if target in e]
    else:
        kept = {target} | first_hop
        for name in first_hop:
            kept |= edges.neighbors(name)
        kept_edges = [e for e in edges.edges if e[0] in kept and e[1] in kept]

    populations = (target, *sorted(kept - {target}))
    matrix = [
        InteractionMatrixEntry(name, WALK_RULE.name, 0, 0) for name in populations
    ]
    for a, b in sorted(kept_edges):
        matrix.append(InteractionMatrixEntry(a, COOC_RULE.name, 1, 1, b, distance))
        if symmetric:
            matrix.append(InteractionMatrixEntry(b, COOC_RULE.name, 1, 1, a, distance))
    return RelationModel(populations, (WALK_RULE, COOC_RULE), tuple(matrix))


def write_report_csv(report: NeighborhoodReport, sink: BinaryIO) -> int:
    """Emit ``population,count`` rows, busiest first, then the average.

    Ties break by name; the final row is ``_average`` with one decimal
    place. LF endings and UTF-8, byte-identical for equal reports.
    """
    rows = sorted(report.counts.items(), key=lambda kv: (-kv[1], kv[0]))
    text = "population,count\n"
    text += "".join(f"{name},{count}\n" for name, count in rows)
    text += f"_average,{report.global_average:.1f}\n"
    data = text.encode("utf-8")
    sink.write(data)
    return len(data)


def read_report_csv(text: str) -> tuple[dict[str, int], float]:
    """Parse a report back into counts and the stored average."""
    lines = text.splitlines()
    if not lines or lines[0] != "population,count":
        raise ParseError(1, "expected header 'population,count'")
    counts: dict[str, int] = {}
    average = None
    for line_no, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if average is not None:
            raise ParseError(line_no, "rows after the _average line")
        name, _, value = line.rpartition(",")
        if not name:
            raise ParseError(line_no, f"expected 'name,count', got {line!r}")
        if name == "_average":
            try:
                average = float(value)
            except ValueError:
                raise ParseError(line_no, f"average must be a number, got {value!r}") from None
        else:
            try:
                counts[name] = int(value)
            except ValueError:
                raise ParseError(line_no, f"count must be an integer, got {value!r}") from None
    if average is None:
        raise ParseError(len(lines), "missing _average row")
    return counts, average


def render_snapshot(state: WorldState, sink: BinaryIO, scale: int = 8) -> int:
    """Write the world as a binary P6 pixmap, one scale x scale block per patch.

    A patch shows the colour of the last agent (in id order) occupying it;
    frozen agents keep their patch. Empty patches are black. Output bytes
    are a pure function of the state.
    """
    if scale < 1:
        raise ValueError("scale must be >= 1")
    side = state.side
    patch = np.zeros((side, side, 3), dtype=np.uint8)
    colors = np.array([PALETTE[i % len(PALETTE)] for i in range(len(state.population_names))],
                      dtype=np.uint8)
    for i in range(state.n_agents):
        x, y = state.positions[i]
        patch[y, x] = colors[state.population_index[i]]
    image = np.repeat(np.repeat(patch, scale, axis=0), scale, axis=1)
    header = f"P6\n{side * scale} {side * scale}\n255\n".encode("ascii")
    data = header + image.tobytes()
    sink.write(data)
    return len(data)
