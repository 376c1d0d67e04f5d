"""Command-line front end.

Every command writes one report: JSON with top-level ``provenance``,
``inputs`` and ``results``, or CSV for sweeps. Verdicts are data; the exit
status is 2 only when inputs fail validation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import metadata
from pathlib import Path
from typing import Callable

import numpy as np

from . import config
from .channels import (
    ChannelSpec,
    absnc_verdict,
    depolarizing,
    discrimination_report,
    identity_channel,
    kraus_channel,
)
from .criteria import (
    map_moments,
    mehta_psd_check,
    p3_ppt_check,
    pt_moments,
    purity_ball_2absn,
    sign_changes,
)
from .errors import AbsnError, BadParameter, SchemaError
from .linalg import partial_transpose, unitarity_residual
from .maps import MapSpec
from .measures import (
    optimize_violation,
    paper_unitary_rho1,
    random_robustness_upper,
    restricted_measure,
    witness_measure_closed_form,
)
from .sampling import haar_unitary, rng_from
from .states import DensityMatrix, isotropic_like, purity
from .unitaries import unitary_u1, unitary_u2
from .witnesses import canonical_witness, conjugate, expectation

TOOL = "abschmidt"


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0.0.0"


# -- parsing helpers ------------------------------------------------------------


def parse_kv(text: str) -> dict[str, str]:
    """``"k=1,d=3"`` -> ``{"k": "1", "d": "3"}``."""
    out = {}
    for part in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in part:
            raise SchemaError(f"expected name=value, got {part!r}")
        key, val = part.split("=", 1)
        out[key.strip()] = val.strip()
    return out


def _num(params: dict, key: str, cast=float, default=None):
    if key not in params:
        if default is None:
            raise SchemaError(f"missing parameter {key!r}")
        return default
    try:
        return cast(params[key])
    except (TypeError, ValueError):
        raise SchemaError(f"parameter {key!r} is not a valid {cast.__name__}: {params[key]!r}") from None


def parse_grid(text: str) -> list[float]:
    """``"a:b:step"`` inclusive of ``b`` (up to rounding), or a single value."""
    parts = text.split(":")
    try:
        nums = [float(x) for x in parts]
    except ValueError:
        raise SchemaError(f"bad grid {text!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3 or nums[2] <= 0 or nums[1] < nums[0]:
        raise SchemaError(f"grid must be a:b:step with a <= b and step > 0, got {text!r}")
    a, b, step = nums
    n = int(np.floor((b - a) / step + 1e-9))
    return [round(a + i * step, 12) for i in range(n + 1)]


def _complex_array(obj: dict, what: str) -> np.ndarray:
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float) if "im" in obj else np.zeros_like(re)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{what} needs numeric 're' (and optional 'im') arrays: {exc}") from None
    if re.shape != im.shape or re.ndim != 2:
        raise SchemaError(f"{what} 're'/'im' must be matching 2-d arrays")
    return re + 1j * im


def _read_json(path: str) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError(f"{path} must hold a JSON object")
    return data


PRESETS = ("isotropic", "maximally_mixed")


def preset_state(name: str, params: dict) -> DensityMatrix:
    if name == "isotropic":
        k = _num(params, "k", int)
        d = _num(params, "d", int)
        p = _num(params, "p", float)
        support = params.get("support")
        if isinstance(support, str):
            support = [int(x) for x in support.split(";") if x]
        return isotropic_like(k, d, p, support)
    if name == "maximally_mixed":
        d = _num(params, "d", int)
        return DensityMatrix.maximally_mixed(d, _num(params, "dB", int, d))
    raise SchemaError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")


def state_from_json(data: dict) -> DensityMatrix:
    if "preset" in data:
        params = data.get("params", {})
        if not isinstance(params, dict):
            raise SchemaError("'params' must be an object")
        return preset_state(str(data["preset"]), params)
    if "dims" in data:
        dims = data["dims"]
        if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(x, int) for x in dims)):
            raise SchemaError("'dims' must be [dA, dB] integers")
        return DensityMatrix(_complex_array(data, "state"), dims[0], dims[1])
    raise SchemaError("state JSON needs either 'preset' or 'dims'/'re'/'im'")


def load_state(source: str, p: float | None = None) -> DensityMatrix:
    """A state from a JSON file path or a ``name:key=value,...`` preset descriptor.

    ``p`` fills in a missing ``p`` parameter of presets.
    """
    if Path(source).suffix == ".json" or Path(source).is_file():
        data = _read_json(source)
    else:
        name, _, rest = source.partition(":")
        data = {"preset": name, "params": parse_kv(rest)}
    if "preset" in data and p is not None:
        data = {"preset": data["preset"], "params": {**data.get("params", {}), "p": p}}
    return state_from_json(data)


def dump_state(rho: DensityMatrix) -> dict:
    """JSON form that loads back entrywise identical (floats keep their shortest round-trip repr)."""
    return {"dims": [rho.dA, rho.dB], "re": rho.matrix.real.tolist(), "im": rho.matrix.imag.tolist()}


def load_unitary(text: str, n: int) -> np.ndarray:
    if text == "identity":
        return np.eye(n, dtype=np.complex128)
    if text.startswith("paper:"):
        which = text[len("paper:"):]
        table: dict[str, Callable[[], np.ndarray]] = {
            "U1": unitary_u1,
            "U2": unitary_u2,
            "rho1": lambda: paper_unitary_rho1("corrected"),
            "rho1-printed": lambda: paper_unitary_rho1("printed"),
        }
        if which not in table:
            raise SchemaError(f"unknown named unitary {which!r}; known: {', '.join(table)}")
        U = table[which]()
    elif text.startswith("haar:"):
        U = haar_unitary(n, rng_from(_num(parse_kv(text[5:]), "seed", int)))
    else:
        U = _complex_array(_read_json(text), "unitary")
    if U.shape != (n, n):
        raise BadParameter(f"unitary has shape {U.shape}, state needs {n}x{n}")
    return U


def load_kraus(path: str) -> ChannelSpec:
    data = _read_json(path)
    ops = data.get("kraus")
    if not isinstance(ops, list) or not ops:
        raise SchemaError("channel JSON needs a nonempty 'kraus' list of {'re','im'} objects")
    return kraus_channel([_complex_array(op, "Kraus operator") for op in ops], label=data.get("label", "kraus"))


def map_spec_from(args, d: int) -> MapSpec:
    params = parse_kv(args.map) if args.map else {}
    r = _num(params, "r", int, args.r if args.r is not None else 1)
    k = _num(params, "k", float, args.k if args.k is not None else 1.0 / r)
    return MapSpec(k, r, d)


# -- commands -------------------------------------------------------------------


def _state_arg(args, p=None) -> tuple[DensityMatrix, dict]:
    source = args.state or args.preset
    if source is None:
        raise SchemaError("give --preset or --state")
    p_val = p if p is not None else (parse_grid(args.p)[0] if args.p else None)
    rho = load_state(source, p_val)
    return rho, {"state": source, "p": p_val, "dims": [rho.dA, rho.dB]}


def cmd_witness(args) -> tuple[dict, dict]:
    rho, inputs = _state_arg(args)
    wparams = parse_kv(args.witness.split(":", 1)[1]) if args.witness and ":" in args.witness else {}
    if args.witness and not args.witness.startswith("canonical"):
        raise SchemaError(f"unknown witness {args.witness!r}; only 'canonical:r=...' is available")
    r = _num(wparams, "r", int, args.r if args.r is not None else 1)
    W = canonical_witness(rho.dA, r)
    U = load_unitary(args.unitary, rho.dim)
    value = expectation(conjugate(W, U), rho)
    inputs.update(witness=f"canonical:r={r}", unitary=args.unitary)
    return inputs, {
        "expectation": value,
        "detected": value < -config.get().witness,
        "unitarity_residual": unitarity_residual(U),
    }


def cmd_moments(args) -> tuple[dict, dict]:
    rho, inputs = _state_arg(args)
    spec = map_spec_from(args, rho.dB)
    U = load_unitary(args.unitary, rho.dim)
    report = map_moments(rho, U, spec)
    pt = pt_moments(rho, 3)
    results = {
        "map": {"k": spec.k, "r": spec.r, "d": spec.d},
        "hankel": report.to_dict(),
        "violating_levels": report.violating_levels,
        "pt_moments": pt,
        "p3_ppt": p3_ppt_check(pt),
        "purity": purity(rho),
    }
    if rho.dA == 3 and rho.dB == 3:
        results["purity_ball"] = purity_ball_2absn(rho).value
        results["mehta_pt_psd"] = mehta_psd_check(partial_transpose(rho.matrix, 3, 3, sys="A"))
    inputs.update(unitary=args.unitary)
    return inputs, results


def cmd_sweep(args) -> tuple[dict, dict]:
    if not args.p:
        raise SchemaError("sweep needs --p a:b:step")
    grid = parse_grid(args.p)
    first, _ = _state_arg(args, grid[0])
    spec = map_spec_from(args, first.dB)
    U = load_unitary(args.unitary, first.dim)
    source = args.state or args.preset
    tol = config.get()

    def point(p):
        with config.override(**tol.as_dict()):
            rep = map_moments(load_state(source, p), U, spec)
        dets = rep.hankel_dets + [float("nan")] * (2 - len(rep.hankel_dets))
        return {"p": p, "detH1": dets[0], "detH2": dets[1], "verdict": rep.verdict.value}

    if args.workers > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(point, grid))
    else:
        rows = [point(p) for p in grid]
    results = {
        "map": {"k": spec.k, "r": spec.r, "d": spec.d},
        "rows": rows,
        "sign_changes": {
            "detH1": sign_changes(grid, [row["detH1"] for row in rows]),
            "detH2": sign_changes(grid, [row["detH2"] for row in rows]),
        },
    }
    return {"state": source, "p": args.p, "unitary": args.unitary}, results


def cmd_measure(args) -> tuple[dict, dict]:
    rho, inputs = _state_arg(args)
    r = args.r if args.r is not None else 1
    results = {
        "closed_form": witness_measure_closed_form(rho, r).to_dict(),
        "optimized": optimize_violation(rho, r, budget=args.budget, seed=args.seed).to_dict(),
    }
    if args.unitary != "identity":
        U = load_unitary(args.unitary, rho.dim)
        results["restricted"] = restricted_measure(rho, canonical_witness(rho.dA, r), U).to_dict()
    if rho.dA == 3 and rho.dB == 3 and r == 2:
        results["random_robustness_upper"] = random_robustness_upper(rho).to_dict()
    inputs.update(r=r, unitary=args.unitary, budget=args.budget)
    return inputs, results


def _channel_arg(args, dim: int) -> ChannelSpec:
    if args.kraus:
        return load_kraus(args.kraus)
    if args.depolarizing is not None:
        return depolarizing(args.depolarizing, dim)
    raise SchemaError("give --depolarizing P or --kraus FILE")


def cmd_channel(args) -> tuple[dict, dict]:
    r = args.r if args.r is not None else 2
    ch = _channel_arg(args, 9)
    d = int(round(np.sqrt(ch.output_dim)))
    k = args.k if args.k is not None else 1.0 / r
    spec = MapSpec(k, r, d)
    inputs_grid = [[1.0 / d] * d] if args.inputs == "uniform" else None
    verdict = absnc_verdict(ch, r, spec, samples=args.samples, seed=args.seed, inputs=inputs_grid)
    inputs = {"channel": ch.to_dict(), "r": r, "k": k, "inputs": args.inputs, "samples": args.samples}
    return inputs, {"verdict": verdict.absnc.value, **verdict.to_dict()}


def cmd_discriminate(args) -> tuple[dict, dict]:
    rho, inputs = _state_arg(args)
    ch2 = _channel_arg(args, rho.dB)
    ch1 = identity_channel(rho.dB)
    prior = args.prior
    tasks = [(prior, ch1, 1.0 - prior, ch2)]
    rows = discrimination_report(rho, tasks, r=2, members=args.budget, seed=args.seed)
    inputs.update(channel_1="identity", channel_2=ch2.to_dict(), prior=prior, members=args.budget)
    return inputs, {"tasks": [row.to_dict() for row in rows]}


COMMANDS = {
    "witness": cmd_witness,
    "moments": cmd_moments,
    "sweep": cmd_sweep,
    "measure": cmd_measure,
    "channel": cmd_channel,
    "discriminate": cmd_discriminate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description="Absolute Schmidt number certification.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--preset", help="preset descriptor, e.g. isotropic:k=1,d=3")
    parser.add_argument("--state", help="state JSON file")
    parser.add_argument("--p", help="mixing parameter, or a:b:step for sweep")
    parser.add_argument("--unitary", default="identity",
                        help="identity | paper:U1 | paper:U2 | paper:rho1 | paper:rho1-printed | haar:seed=N | FILE")
    parser.add_argument("--map", help="reduction map parameters, e.g. k=1,r=1")
    parser.add_argument("--witness", help="canonical:r=R")
    parser.add_argument("--depolarizing", type=float, help="depolarizing parameter p")
    parser.add_argument("--kraus", help="channel JSON file with a 'kraus' list")
    parser.add_argument("--inputs", choices=["grid", "uniform"], default="grid",
                        help="channel inputs: uniform Schmidt weights, or those plus 20 seeded simplex points")
    parser.add_argument("--prior", type=float, default=0.5, help="prior of the identity channel in discriminate")
    parser.add_argument("--samples", type=int, default=20, help="unitaries in the covariance probe")
    parser.add_argument("--r", type=int)
    parser.add_argument("--k", type=float)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=32, help="optimizer restarts / sampled member states")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--output", help="write the report here instead of stdout")
    parser.add_argument("--tolerance", action="append", default=[], metavar="NAME=VALUE")
    return parser


def _tolerance_overrides(items: list[str]) -> dict[str, float]:
    out = {}
    for item in items:
        for key, val in parse_kv(item).items():
            if key not in config.DEFAULT.as_dict():
                raise SchemaError(f"unknown tolerance {key!r}")
            out[key] = _num({key: val}, key, float)
    return out


def render_csv(command: str, results: dict) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if command == "sweep":
        writer.writerow(["p", "detH1", "detH2", "verdict"])
        for row in results["rows"]:
            writer.writerow([repr(row["p"]), repr(row["detH1"]), repr(row["detH2"]), row["verdict"]])
    else:
        writer.writerow(["key", "value"])
        for key, val in _flatten(results):
            writer.writerow([key, val])
    return buf.getvalue()


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for key in obj:
            yield from _flatten(obj[key], f"{prefix}{key}.")
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        for i, item in enumerate(obj):
            yield from _flatten(item, f"{prefix}{i}.")
    else:
        yield prefix[:-1], json.dumps(obj)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    args = build_parser().parse_args(argv)
    try:
        overrides = _tolerance_overrides(args.tolerance)
        with config.override(**overrides) as tol:
            inputs, results = COMMANDS[args.command](args)
            provenance = {
                "tool": TOOL,
                "version": _version(),
                "command": args.command,
                "seed": args.seed,
                "tolerances": tol.as_dict(),
            }
    except AbsnError as exc:
        err = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        print(json.dumps(err, sort_keys=True), file=stderr)
        return 2
    if args.format == "csv":
        text = render_csv(args.command, results)
    else:
        text = json.dumps({"provenance": provenance, "inputs": inputs, "results": results}, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
