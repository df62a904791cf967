"""Command line front end: ingest, normalize, distances, clustering, plots.

Every pipeline stage is its own subcommand so intermediate artifacts can be
produced and inspected independently; ``pipeline`` chains them all.  Flags
override an optional ``key=value`` config file, which overrides built-in
defaults.  Exit codes: 0 success, 1 input error, 2 computation error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dataio, svgplot, synth
from .density import InvalidCcdError, density_from_ccd, leaf_outline, normalize_leaf
from .distances import DistanceKind, DistanceTag, distance_matrix
from .hcluster import Dendrogram, Linkage, agglomerate, cut, to_newick

DISTANCE_CHOICES = ("l1", "sup", "hellinger", "moments", "all")

_INPUT_ERRORS = (OSError, dataio.DataFormatError, InvalidCcdError, ValueError)


class StageError(Exception):
    """A pipeline stage failed; carries the exit code to report."""

    def __init__(self, stage: str, message: str, code: int):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.code = code


def _read_config(path: str) -> dict:
    values: dict = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise StageError("config", str(exc), 1) from None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise StageError("config", f"{path}:{line_no}: expected key=value", 1)
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = _coerce(value.strip())
    return values


def _coerce(value: str):
    low = value.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    for conv in (int, float):
        try:
            return conv(value)
        except ValueError:
            pass
    return value


class Options:
    """Flag > config-file > default resolution for one subcommand run."""

    def __init__(self, args: argparse.Namespace, defaults: dict):
        self._flags = {k: v for k, v in vars(args).items() if v is not None}
        config_path = self._flags.get("config")
        self._config = _read_config(config_path) if config_path else {}
        self._defaults = defaults

    def get(self, key: str):
        if key in self._flags:
            return self._flags[key]
        if key in self._config:
            return self._config[key]
        return self._defaults.get(key)

    def require(self, key: str):
        value = self.get(key)
        if value is None:
            raise StageError("config", f"missing required option --{key.replace('_', '-')}", 1)
        return value


def _kinds_for(name: str, r: int) -> list[DistanceKind]:
    if r < 1:
        raise StageError("config", f"moment order r must be >= 1, got {r}", 1)
    if name == "all":
        return [DistanceKind(tag, r) for tag in DistanceTag]
    tag = {
        "l1": DistanceTag.L1,
        "sup": DistanceTag.SUP,
        "hellinger": DistanceTag.HELLINGER_SQ,
        "moments": DistanceTag.MOMENT_EUCLIDEAN,
    }.get(name)
    if tag is None:
        raise StageError("config", f"unknown distance {name!r}", 1)
    return [DistanceKind(tag, r)]


def _load_dataset(opts: Options) -> dataio.Dataset:
    path = opts.require("input")
    fmt = opts.get("format")
    try:
        return dataio.read_dataset(path, fmt)
    except _INPUT_ERRORS as exc:
        raise StageError("read-dataset", str(exc), 1) from exc


def _normalize_all(dataset: dataio.Dataset):
    try:
        return [normalize_leaf(seq) for seq in dataset.sequences]
    except InvalidCcdError as exc:
        raise StageError("normalize", str(exc), 2) from exc


def _outdir(opts: Options) -> Path:
    out = Path(opts.get("outdir"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _wrote(path: Path) -> None:
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# subcommands


def cmd_synth(args: argparse.Namespace) -> int:
    opts = Options(args, dict(groups=4, per_group=5, n_min=500, n_max=4000,
                              noise=0.02, seed=0, output="synthetic.json"))
    try:
        dataset = synth.synth_dataset(
            int(opts.get("groups")), int(opts.get("per_group")),
            (int(opts.get("n_min")), int(opts.get("n_max"))),
            float(opts.get("noise")), int(opts.get("seed")),
        )
    except ValueError as exc:
        raise StageError("synth", str(exc), 1) from exc
    out = Path(opts.get("output"))
    dataio.write_dataset(dataset, out, fmt="json")
    _wrote(out)
    return 0


def cmd_densify(args: argparse.Namespace) -> int:
    opts = Options(args, dict(format="csv", outdir="out"))
    dataset = _load_dataset(opts)
    densities = _normalize_all(dataset)
    out = _outdir(opts) / "densities.json"
    dataio.write_densities(densities, out)
    _wrote(out)
    return 0


def _densities_for_distmat(opts: Options):
    fmt = opts.get("format")
    if fmt == "densities":
        try:
            return dataio.read_densities(opts.require("input"))
        except _INPUT_ERRORS as exc:
            raise StageError("read-densities", str(exc), 1) from exc
    return _normalize_all(_load_dataset(opts))


def cmd_distmat(args: argparse.Namespace) -> int:
    opts = Options(args, dict(format="csv", distance="all", r=5, outdir="out"))
    densities = _densities_for_distmat(opts)
    labels = [d.source_id for d in densities]
    out = _outdir(opts)
    for kind in _kinds_for(opts.get("distance"), int(opts.get("r"))):
        try:
            dm = distance_matrix(densities, labels, kind)
        except ValueError as exc:
            raise StageError(f"distances-{kind.name}", str(exc), 2) from exc
        for fmt in ("csv", "json"):
            path = out / f"matrix_{kind.name}.{fmt}"
            dataio.write_matrix(dm, path, fmt)
            _wrote(path)
    return 0


def cmd_cluster(args: argparse.Namespace) -> int:
    opts = Options(args, dict(format="csv", linkage="complete", outdir="out"))
    try:
        dm = dataio.read_matrix(opts.require("input"), opts.get("format"))
    except _INPUT_ERRORS as exc:
        raise StageError("read-matrix", str(exc), 1) from exc
    out = _outdir(opts)
    dend = _cluster_one(dm, opts.get("linkage"))
    _write_tree(dend, out, "dendrogram", opts)
    return 0


def _cluster_one(dm, linkage_name: str) -> Dendrogram:
    try:
        return agglomerate(dm, Linkage(linkage_name))
    except ValueError as exc:
        raise StageError("cluster", str(exc), 2) from exc


def _write_tree(dend: Dendrogram, out: Path, stem: str, opts: Options) -> None:
    json_path = out / f"{stem}.json"
    dataio.write_dendrogram(dend, json_path)
    _wrote(json_path)
    nwk_path = out / f"{stem}.nwk"
    nwk_path.write_text(to_newick(dend) + "\n")
    _wrote(nwk_path)
    k = opts.get("cut")
    if k is not None:
        try:
            assignment = cut(dend, int(k))
        except ValueError as exc:
            raise StageError("cut", str(exc), 2) from exc
        clusters_path = out / f"{stem.replace('dendrogram', 'clusters')}.json"
        dataio.write_clusters(dend.labels, assignment, int(k), clusters_path)
        _wrote(clusters_path)


def cmd_plot(args: argparse.Namespace) -> int:
    opts = Options(args, dict(format="csv", outdir="out"))
    dataset = _load_dataset(opts)
    out = _outdir(opts)
    _plot_dataset(dataset, out)
    dend_path = opts.get("dendrogram")
    if dend_path is not None:
        try:
            dend = dataio.read_dendrogram(dend_path)
        except _INPUT_ERRORS as exc:
            raise StageError("read-dendrogram", str(exc), 1) from exc
        path = out / "dendrogram.svg"
        svgplot.plot_dendrogram(dend, path)
        _wrote(path)
    return 0


def _plot_dataset(dataset: dataio.Dataset, out: Path) -> None:
    try:
        raw = [density_from_ccd(seq) for seq in dataset.sequences]
        normalized = [normalize_leaf(seq) for seq in dataset.sequences]
        flat = [leaf_outline(seq) for seq in dataset.sequences]
        turned = [leaf_outline(seq, rotated=True) for seq in dataset.sequences]
    except InvalidCcdError as exc:
        raise StageError("plot", str(exc), 2) from exc
    for name, densities, title in (
        ("densities_unrotated.svg", raw, "circular densities (unrotated)"),
        ("densities_normalized.svg", normalized, "circular densities (normalized)"),
    ):
        path = out / name
        svgplot.plot_densities(densities, path, groups=dataset.groups, title=title)
        _wrote(path)
    for name, outlines in (
        ("leaves_unrotated.svg", flat),
        ("leaves_rotated.svg", turned),
    ):
        path = out / name
        svgplot.plot_leaves(outlines, path)
        _wrote(path)


def cmd_pipeline(args: argparse.Namespace) -> int:
    opts = Options(args, dict(format="csv", distance="all", r=5,
                              linkage="complete", outdir="out"))
    dataset = _load_dataset(opts)
    out = _outdir(opts)
    densities = _normalize_all(dataset)
    labels = [d.source_id for d in densities]
    for kind in _kinds_for(opts.get("distance"), int(opts.get("r"))):
        try:
            dm = distance_matrix(densities, labels, kind)
        except ValueError as exc:
            raise StageError(f"distances-{kind.name}", str(exc), 2) from exc
        for fmt in ("csv", "json"):
            path = out / f"matrix_{kind.name}.{fmt}"
            dataio.write_matrix(dm, path, fmt)
            _wrote(path)
        dend = _cluster_one(dm, opts.get("linkage"))
        _write_tree(dend, out, f"dendrogram_{kind.name}", opts)
        if not opts.get("no_plots"):
            path = out / f"dendrogram_{kind.name}.svg"
            svgplot.plot_dendrogram(dend, path, title=f"complete linkage, {kind.name}")
            _wrote(path)
    if not opts.get("no_plots"):
        _plot_dataset(dataset, out)
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sub: argparse.ArgumentParser, *names: str) -> None:
    flags = {
        "input": dict(help="input file"),
        "format": dict(choices=("csv", "json", "densities"), help="input format"),
        "distance": dict(choices=DISTANCE_CHOICES, help="distance kind"),
        "r": dict(type=int, help="moment order for the moments distance"),
        "linkage": dict(choices=tuple(l.value for l in Linkage), help="linkage rule"),
        "cut": dict(type=int, help="extract this many flat clusters"),
        "outdir": dict(help="output directory"),
        "dendrogram": dict(help="dendrogram JSON to plot"),
        "seed": dict(type=int, help="random seed"),
        "groups": dict(type=int, help="number of groups"),
        "per-group": dict(type=int, help="leaves per group"),
        "n-min": dict(type=int, help="minimum trace resolution"),
        "n-max": dict(type=int, help="maximum trace resolution"),
        "noise": dict(type=float, help="multiplicative noise level"),
        "output": dict(help="output file"),
    }
    for name in names:
        sub.add_argument(f"--{name}", **flags[name])
    sub.add_argument("--config", help="key=value config file (flags override it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leafclust",
        description="Cluster leaf shapes from centroid-contour-distance traces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a labeled synthetic dataset")
    _add_common(p, "groups", "per-group", "n-min", "n-max", "noise", "seed", "output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("densify", help="normalize a dataset into step densities")
    _add_common(p, "input", "format", "outdir")
    p.set_defaults(func=cmd_densify)

    p = sub.add_parser("distmat", help="compute pairwise distance matrices")
    _add_common(p, "input", "format", "distance", "r", "outdir")
    p.set_defaults(func=cmd_distmat)

    p = sub.add_parser("cluster", help="cluster a distance matrix")
    _add_common(p, "input", "format", "linkage", "cut", "outdir")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("plot", help="render density, leaf and dendrogram SVGs")
    _add_common(p, "input", "format", "dendrogram", "outdir")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("pipeline", help="run the full pipeline")
    _add_common(p, "input", "format", "distance", "r", "linkage", "cut", "outdir")
    p.add_argument("--no-plots", action="store_const", const=True, dest="no_plots",
                   help="skip SVG output")
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"leafclust: error {exc}", file=sys.stderr)
        return exc.code
    except Exception as exc:  # pragma: no cover - unexpected failure
        print(f"leafclust: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
