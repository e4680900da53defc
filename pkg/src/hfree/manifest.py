"""Flat sectioned key-value manifests.

Format: `[section]` headers followed by `key = value` lines. Values are
numbers, booleans, bare words, quoted strings (expressions in the DSL), or
bracketed arrays of values, arbitrarily nested. `#` starts a comment.

Sections: [manifold] (coords, box, periodic), [frame] (vectors) or
[structure] (type plus parameters), [map] (components), optional [outer]
(coords, components), [check] (mode, samples, seed, tolerance, grid).
"""

from __future__ import annotations

from dataclasses import dataclass

from .brackets import RPStructure, SymplecticChart, contact_frame, hamiltonian_field
from .expr import ParseError, parse
from .fields import Chart, Frame, SmoothMap, VectorField


class ManifestError(Exception):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


MODES = ("immersion", "free", "identity", "bracket-laws")


@dataclass
class Manifest:
    chart: Chart
    frame_vectors: list | None  # list of component-string lists
    structure: dict | None  # {"type": ..., plus parameters}
    map_components: list
    outer: dict | None  # {"coords": [...], "components": [...]}
    mode: str
    samples: int = 10000
    seed: int = 0
    tolerance: float = 1e-9
    grid: list | None = None


def _parse_value(text: str, line: int):
    value, rest = _value(text.strip(), line)
    if rest.strip():
        raise ManifestError(f"trailing input after value: {rest.strip()!r}", line)
    return value


def _value(text: str, line: int):
    text = text.lstrip()
    if not text:
        raise ManifestError("missing value", line)
    if text[0] == "[":
        items = []
        rest = text[1:].lstrip()
        if rest.startswith("]"):
            return items, rest[1:]
        while True:
            item, rest = _value(rest, line)
            items.append(item)
            rest = rest.lstrip()
            if rest.startswith(","):
                rest = rest[1:]
                continue
            if rest.startswith("]"):
                return items, rest[1:]
            raise ManifestError(f"expected ',' or ']' in array near {rest[:10]!r}", line)
    if text[0] == '"':
        end = text.find('"', 1)
        if end < 0:
            raise ManifestError("unterminated string", line)
        return text[1:end], text[end + 1 :]
    # bare token: number, boolean, or word
    end = 0
    while end < len(text) and text[end] not in ",]\" \t":
        end += 1
    token, rest = text[:end], text[end:]
    if token == "true":
        return True, rest
    if token == "false":
        return False, rest
    try:
        return int(token), rest
    except ValueError:
        pass
    try:
        return float(token), rest
    except ValueError:
        pass
    return token, rest


def parse_manifest_text(text: str) -> Manifest:
    sections: dict[str, dict] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name in sections:
                raise ManifestError(f"duplicate section [{name}]", lineno)
            sections[name] = {}
            current = name
            continue
        if current is None:
            raise ManifestError("key outside any section", lineno)
        if "=" not in line:
            raise ManifestError(f"expected 'key = value', got {line!r}", lineno)
        key, _, rhs = line.partition("=")
        sections[current][key.strip()] = _parse_value(rhs, lineno)
    return _interpret(sections)


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def _need(sections, name) -> dict:
    if name not in sections:
        raise ManifestError(f"missing required section [{name}]")
    return sections[name]


def _interpret(sections: dict) -> Manifest:
    structure = sections.get("structure")
    if structure is not None and "type" not in structure:
        raise ManifestError("[structure] needs a 'type' key")
    if "frame" in sections and structure is not None:
        raise ManifestError("give either [frame] or [structure], not both")

    if "manifold" in sections:
        chart = _chart_from(sections["manifold"])
    elif structure is not None and structure.get("type") == "contact":
        chart = contact_frame(int(structure.get("n", 1))).chart
    else:
        raise ManifestError("missing required section [manifold]")

    frame_vectors = None
    if "frame" in sections:
        frame_vectors = sections["frame"].get("vectors")
        if not isinstance(frame_vectors, list) or not frame_vectors:
            raise ManifestError("[frame] needs a non-empty 'vectors' array")

    check = _need(sections, "check")
    mode = check.get("mode")
    if mode not in MODES:
        raise ManifestError(f"check mode must be one of {MODES}, got {mode!r}")

    map_section = sections.get("map", {})
    components = map_section.get("components", [])
    if mode != "bracket-laws" and not components:
        raise ManifestError("[map] needs a non-empty 'components' array")

    outer = sections.get("outer")
    if outer is not None and "components" not in outer:
        raise ManifestError("[outer] needs a 'components' array")

    grid = check.get("grid")
    if grid is not None and (
        not isinstance(grid, list) or len(grid) != chart.dim
    ):
        raise ManifestError("grid needs one count per coordinate axis")

    m = Manifest(
        chart=chart,
        frame_vectors=frame_vectors,
        structure=structure,
        map_components=list(components),
        outer=outer,
        mode=mode,
        samples=int(check.get("samples", 10000)),
        seed=int(check.get("seed", 0)),
        tolerance=float(check.get("tolerance", 1e-9)),
        grid=grid,
    )
    if m.samples < 1:
        raise ManifestError("samples must be positive")
    if m.tolerance <= 0:
        raise ManifestError("tolerance must be positive")
    if not 0 <= m.seed < 2**64:
        raise ManifestError("seed must fit in 64 unsigned bits")
    return m


def _chart_from(section: dict) -> Chart:
    coords = section.get("coords")
    if not isinstance(coords, list) or not coords:
        raise ManifestError("[manifold] needs a non-empty 'coords' array")
    box = section.get("box")
    if not isinstance(box, list) or len(box) != len(coords):
        raise ManifestError("[manifold] needs a 'box' array with one [lo, hi] per coordinate")
    periodic = section.get("periodic", [False] * len(coords))
    if "dim" in section and int(section["dim"]) != len(coords):
        raise ManifestError("dim does not match the number of coordinates")
    try:
        return Chart(
            coords=tuple(str(c) for c in coords),
            box=tuple((float(lo), float(hi)) for lo, hi in box),
            periodic=tuple(bool(p) for p in periodic),
        )
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"bad [manifold] section: {exc}") from exc


def _parse_expr(src, context: str):
    try:
        return parse(str(src))
    except ParseError as exc:
        raise ManifestError(f"bad expression in {context}: {exc}") from exc


def build_frame(m: Manifest) -> Frame:
    """Materialize the frame, either from explicit vectors or a structure."""
    if m.frame_vectors is not None:
        fields = []
        for i, comps in enumerate(m.frame_vectors):
            if not isinstance(comps, list) or len(comps) != m.chart.dim:
                raise ManifestError(
                    f"frame vector {i} needs {m.chart.dim} component expressions"
                )
            exprs = tuple(_parse_expr(c, f"frame vector {i}") for c in comps)
            fields.append(VectorField(m.chart, exprs))
        return Frame(m.chart, tuple(fields))
    if m.structure is None:
        raise ManifestError("no [frame] or [structure] to build a frame from")
    kind = m.structure["type"]
    if kind == "contact":
        return contact_frame(int(m.structure.get("n", 1)))
    if kind == "canonical":
        n = int(m.structure.get("n", m.chart.dim // 2))
        sc = SymplecticChart(n=n, chart=m.chart)
        hams = m.structure.get("hamiltonians")
        if not isinstance(hams, list) or not hams:
            raise ManifestError("canonical structure needs a 'hamiltonians' array")
        fields = tuple(
            hamiltonian_field(sc, _parse_expr(h, "hamiltonians")) for h in hams
        )
        return Frame(m.chart, fields)
    if kind == "riemann-poisson":
        structure = build_rp_structure(m)
        h = m.structure.get("hamiltonian")
        if h is None:
            raise ManifestError("riemann-poisson frame needs a 'hamiltonian' expression")
        sign = int(m.structure.get("sign", 1))
        from .brackets import rp_hamiltonian_field

        return Frame(
            m.chart,
            (rp_hamiltonian_field(structure, _parse_expr(h, "hamiltonian"), sign=sign),),
        )
    raise ManifestError(f"unknown structure type {kind!r}")


def build_rp_structure(m: Manifest) -> RPStructure:
    spec = m.structure or {}
    if "H_gradients" in spec:
        grads = tuple(
            tuple(_parse_expr(c, "H_gradients") for c in row) for row in spec["H_gradients"]
        )
        return RPStructure(m.chart, grads)
    h_list = spec.get("H")
    if not isinstance(h_list, list) or not h_list:
        raise ManifestError("riemann-poisson structure needs an 'H' (or 'H_gradients') array")
    return RPStructure.from_functions(m.chart, [_parse_expr(h, "H") for h in h_list])


def build_map(m: Manifest) -> SmoothMap:
    comps = tuple(_parse_expr(c, "map components") for c in m.map_components)
    try:
        return SmoothMap(m.chart, comps)
    except Exception as exc:
        raise ManifestError(f"bad [map] section: {exc}") from exc


def build_outer(m: Manifest, k: int) -> SmoothMap:
    from .constructions import monomial_free_map

    if m.outer is None:
        return monomial_free_map(k)
    coords = m.outer.get("coords", [f"x{i + 1}" for i in range(k)])
    chart = Chart(
        coords=tuple(str(c) for c in coords),
        box=tuple((-2.0, 2.0) for _ in coords),
    )
    comps = tuple(_parse_expr(c, "outer components") for c in m.outer["components"])
    return SmoothMap(chart, comps)


def load_manifest(path: str) -> Manifest:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_manifest_text(fh.read())
    except OSError as exc:
        raise ManifestError(f"cannot read {path}: {exc}") from exc
