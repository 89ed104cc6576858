"""Figure specifications: what to read, what kind of figure, where to write."""

import json
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("sample_paths", "burn_in", "srank_profile", "bound_overlay")


class SpecError(ValueError):
    """Raised for an invalid figure spec or a CSV that does not match it."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure: input CSVs, kind, scale flags, output path.

    kind selects the renderer:
      sample_paths   translucent per-trial hairlines with a heavy mean overlay
      burn_in        one mean-error curve per series value
      srank_profile  log stable rank against nu, one curve per series value
      bound_overlay  empirical points against bound curves, per block size

    inputs maps role names to CSV paths.  sample_paths needs "trials" and
    "mean" plus the ell field; burn_in and srank_profile need "table";
    bound_overlay needs "table" with table set to "prob" (then eps selects
    the slice) or "expect".  overlay optionally names one extra CSV column
    pair to draw as a reference curve; nothing is ever recomputed from it.
    """

    kind: str
    inputs: dict
    out: str
    ell: int | None = None
    table: str = "prob"
    eps: float | None = None
    log_y: bool = True
    series_label: str = "series"
    title: str = ""
    overlay: dict | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}; "
                            f"expected one of {', '.join(KINDS)}")
        needed = {"sample_paths": ("trials", "mean"),
                  "burn_in": ("table",),
                  "srank_profile": ("table",),
                  "bound_overlay": ("table",)}[self.kind]
        for role in needed:
            if role not in self.inputs:
                raise SpecError(f"{self.kind} figure needs inputs[{role!r}]")
            if not Path(self.inputs[role]).is_file():
                raise SpecError(f"input CSV not found: {self.inputs[role]}")
        if self.kind == "sample_paths" and self.ell is None:
            raise SpecError("sample_paths figure needs ell")
        if self.kind == "bound_overlay":
            if self.table not in ("prob", "expect"):
                raise SpecError("bound_overlay table must be 'prob' or 'expect'")
            if self.table == "prob" and self.eps is None:
                raise SpecError("bound_overlay on the prob table needs eps")
        if self.overlay is not None:
            for key in ("csv", "x", "y"):
                if key not in self.overlay:
                    raise SpecError(f"overlay needs {key!r}")
            if not Path(self.overlay["csv"]).is_file():
                raise SpecError(f"overlay CSV not found: {self.overlay['csv']}")
        suffix = Path(self.out).suffix.lower()
        if suffix not in (".svg", ".pdf"):
            raise SpecError(f"output must be .svg or .pdf, got {self.out!r}")


_FIELDS = {"kind", "inputs", "out", "ell", "table", "eps", "log_y",
           "series_label", "title", "overlay"}


def spec_from_dict(raw: dict, base_dir: Path | str = ".") -> FigureSpec:
    """Build a FigureSpec from parsed JSON; paths resolve against base_dir."""
    if not isinstance(raw, dict):
        raise SpecError("figure spec must be a JSON object")
    unknown = set(raw) - _FIELDS
    if unknown:
        raise SpecError(f"unknown spec fields: {', '.join(sorted(unknown))}")
    for key in ("kind", "inputs", "out"):
        if key not in raw:
            raise SpecError(f"figure spec needs {key!r}")
    base = Path(base_dir)
    raw = dict(raw)
    if not isinstance(raw["inputs"], dict):
        raise SpecError("inputs must map role names to CSV paths")
    raw["inputs"] = {role: str(base / p) for role, p in raw["inputs"].items()}
    raw["out"] = str(base / raw["out"])
    if raw.get("overlay") is not None:
        overlay = dict(raw["overlay"])
        if "csv" in overlay:
            overlay["csv"] = str(base / overlay["csv"])
        raw["overlay"] = overlay
    if raw.get("ell") is not None:
        raw["ell"] = int(raw["ell"])
    if raw.get("eps") is not None:
        raw["eps"] = float(raw["eps"])
    return FigureSpec(**raw)


def load_spec(path) -> FigureSpec:
    """Read one figure spec from a JSON file; paths resolve against its dir."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path} is not valid JSON: {exc}")
    return spec_from_dict(raw, path.parent)


def load_manifest(path) -> list:
    """Read a manifest file: {"figures": [spec, ...]} with shared base dir."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise SpecError(f"manifest file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path} is not valid JSON: {exc}")
    if not isinstance(raw, dict) or "figures" not in raw:
        raise SpecError("manifest must be an object with a 'figures' list")
    figures = raw["figures"]
    if not isinstance(figures, list) or not figures:
        raise SpecError("manifest 'figures' must be a non-empty list")
    return [spec_from_dict(entry, path.parent) for entry in figures]
