"""Small numerical helpers used by several modules."""
from __future__ import annotations

import json
import math
from typing import Callable


def fmt(x: float) -> str:
    """Format a float with 17 significant digits, stable across runs."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    return format(float(x), ".17g")


def bisect_newton(
    f: Callable[[float], float],
    fprime: Callable[[float], float] | None,
    lo: float,
    hi: float,
    xtol: float = 1e-12,
    newton_steps: int = 4,
) -> float:
    """Root of ``f`` in ``[lo, hi]`` by bisection to ``xtol``, then Newton polish.

    The bracket must contain a sign change. Newton updates that leave the final
    bisection bracket are rejected, so the polish can only improve the estimate.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    if fprime is None:
        return x
    for _ in range(newton_steps):
        d = fprime(x)
        if d == 0.0 or not math.isfinite(d):
            break
        x_new = x - f(x) / d
        if not (lo <= x_new <= hi):
            break
        if x_new == x:
            break
        x = x_new
    return x


def dumps_json(obj, indent: int = 1) -> str:
    """JSON text with sorted keys and every float written by ``fmt``.

    The standard encoder prints the shortest round-trip repr, whose digit count
    varies; fixing it keeps output byte-identical across platforms. Non-finite
    floats become ``null``.
    """

    def emit(o, depth: int) -> str:
        pad = "\n" + " " * (indent * (depth + 1))
        end = "\n" + " " * (indent * depth)
        if o is None or isinstance(o, (bool, int, str)):
            return json.dumps(o)
        if isinstance(o, float):
            return fmt(o) if math.isfinite(o) else "null"
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [json.dumps(str(k)) + ": " + emit(o[k], depth + 1) for k in sorted(o, key=str)]
            return "{" + pad + ("," + pad).join(items) + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            return "[" + pad + ("," + pad).join(emit(v, depth + 1) for v in o) + end + "]"
        if hasattr(o, "item"):  # numpy scalar
            return emit(o.item(), depth)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return emit(obj, 0) + "\n"
