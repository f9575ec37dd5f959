"""Sum-product kernels.

Two interchangeable implementations of "multiply these dense factors and
sum out one variable": a numba-compiled strided loop and a numpy einsum
fallback.  ``CAUSALIND_NO_NUMBA=1`` (or a missing numba install) selects
the numpy path at import time; :func:`use_backend` switches at runtime.
"""

from __future__ import annotations

import os
from contextlib import contextmanager

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def _env_backend() -> str:
    flag = os.environ.get("CAUSALIND_NO_NUMBA", "").strip().lower()
    if not HAVE_NUMBA or flag not in ("", "0", "false", "no"):
        return "numpy"
    return "numba"


BACKEND = _env_backend()


def sum_product_numpy(arrays, axes_list, cards, keep):
    """Product of ``arrays`` (array k spans union axes ``axes_list[k]``) summed onto ``keep``.

    ``cards`` gives the cardinality of every union axis; the result spans
    the axes listed in ``keep`` in that order.
    """
    if len(cards) > len(_LETTERS):
        return _sum_product_broadcast(arrays, axes_list, cards, keep)
    subs = ",".join("".join(_LETTERS[a] for a in axes) for axes in axes_list)
    out = "".join(_LETTERS[a] for a in keep)
    return np.einsum(f"{subs}->{out}", *arrays, optimize=False)


def _sum_product_broadcast(arrays, axes_list, cards, keep):
    m = len(cards)
    acc = np.ones([1] * m)
    for arr, axes in zip(arrays, axes_list):
        order = np.argsort(axes)
        shape = [1] * m
        for a in axes:
            shape[a] = cards[a]
        acc = acc * np.transpose(arr, order).reshape(shape)
    drop = tuple(a for a in range(m) if a not in keep)
    acc = np.broadcast_to(acc, cards).sum(axis=drop) if drop else np.broadcast_to(acc, cards)
    remaining = [a for a in range(m) if a in keep]
    return np.transpose(acc, [remaining.index(a) for a in keep]).copy()


if HAVE_NUMBA:

    @njit(cache=True)
    def _strided_kernel(cards, strides, flat, offsets, out_strides, out_size):  # pragma: no cover
        # odometer over every axis but the last; the last axis is a tight inner loop
        k, m = strides.shape
        out = np.zeros(out_size)
        inner = cards[m - 1]
        outer = 1
        for d in range(m - 1):
            outer *= cards[d]
        last = strides[:, m - 1].copy()
        o_last = out_strides[m - 1]
        pos = offsets.copy()
        counter = np.zeros(m, dtype=np.int64)
        o = 0
        for _ in range(outer):
            for t in range(inner):
                p = 1.0
                for f in range(k):
                    p *= flat[pos[f] + t * last[f]]
                out[o + t * o_last] += p
            d = m - 2
            while d >= 0:
                counter[d] += 1
                o += out_strides[d]
                for f in range(k):
                    pos[f] += strides[f, d]
                if counter[d] < cards[d]:
                    break
                o -= out_strides[d] * cards[d]
                for f in range(k):
                    pos[f] -= strides[f, d] * cards[d]
                counter[d] = 0
                d -= 1
        return out


def _row_major_strides(shape):
    strides = np.zeros(len(shape), dtype=np.int64)
    s = 1
    for d in range(len(shape) - 1, -1, -1):
        strides[d] = s
        s *= shape[d]
    return strides


def sum_product_numba(arrays, axes_list, cards, keep):
    m = len(cards)
    cards_arr = np.asarray(cards, dtype=np.int64)
    k = len(arrays)
    strides = np.zeros((k, m), dtype=np.int64)
    offsets = np.zeros(k, dtype=np.int64)
    chunks = []
    off = 0
    for f, (arr, axes) in enumerate(zip(arrays, axes_list)):
        arr = np.ascontiguousarray(arr, dtype=np.float64)
        for a, s in zip(axes, _row_major_strides(arr.shape)):
            strides[f, a] = s
        offsets[f] = off
        off += arr.size
        chunks.append(arr.ravel())
    flat = np.concatenate(chunks) if chunks else np.zeros(0)
    out_shape = tuple(cards[a] for a in keep)
    out_strides = np.zeros(m, dtype=np.int64)
    for a, s in zip(keep, _row_major_strides(out_shape)):
        out_strides[a] = s
    out_size = int(np.prod(out_shape, dtype=np.int64))
    if m == 0:
        return np.asarray(np.prod([a.item() for a in arrays]) if arrays else 1.0)
    # iterate the widest axis innermost
    it = np.argsort(cards_arr, kind="stable")
    out = _strided_kernel(
        cards_arr[it], np.ascontiguousarray(strides[:, it]), flat, offsets, out_strides[it], out_size
    )
    return out.reshape(out_shape)


def sum_product(arrays, axes_list, cards, keep):
    if BACKEND == "numba":
        return sum_product_numba(arrays, axes_list, cards, keep)
    return sum_product_numpy(arrays, axes_list, cards, keep)


def current_backend() -> str:
    return BACKEND


def set_backend(name: str) -> None:
    global BACKEND
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    BACKEND = name


@contextmanager
def use_backend(name: str):
    previous = BACKEND
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)
