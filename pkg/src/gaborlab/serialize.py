"""CSV, JSON and binary serialization of the laboratory's data objects.

Formats:
* phase-space CSV: optional '# key=value' comment lines, then a header row
  'x,omega,re,im' and one row per grid point, x-major;
* Gabor matrix CSV: header 'lambda_k,lambda_l,mu_k,mu_l,re,im,abs';
* envelope CSV: header 'k1,k2,value';
* binary dump: magic 'TFQ1', then little-endian uint32 n_x, n_omega,
  float64 x_origin, x_spacing, omega_origin, omega_spacing, then
  n_x*n_omega (re, im) float64 pairs, x-major;
* JSON reports carry a 'schema_version' field and are written with sorted
  keys so identical inputs produce identical bytes.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .phase_space import Grid, Lattice
from .norms import LatticeArray
from .stft import PhaseSpaceArray
from .quantization import GaborMatrix

__all__ = ["write_phase_space_csv", "write_phase_space_binary",
           "read_phase_space_binary", "write_gabor_matrix_csv",
           "write_gabor_matrix_binary", "read_binary_raw",
           "write_envelope_csv", "decay_report_dict", "write_json",
           "format_float"]

_MAGIC = b"TFQ1"
JSON_SCHEMA_VERSION = 1


def format_float(x: float) -> str:
    """Shortest round-trip decimal form; deterministic across runs."""
    return format(float(x), ".17g")


def _comment_lines(meta: dict | None) -> list[str]:
    if not meta:
        return []
    return [f"# {k}={meta[k]}" for k in sorted(meta)]


def write_phase_space_csv(arr: PhaseSpaceArray, path, meta: dict | None = None):
    lines = _comment_lines(meta)
    lines.append("x,omega,re,im")
    xs = arr.x_grid.points
    oms = arr.omega_grid.points
    for i, x in enumerate(xs):
        row = arr.values[i]
        for k, om in enumerate(oms):
            lines.append(f"{format_float(x)},{format_float(om)},"
                         f"{format_float(row[k].real)},{format_float(row[k].imag)}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_phase_space_binary(arr: PhaseSpaceArray, path):
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", arr.x_grid.n_samples, arr.omega_grid.n_samples))
        fh.write(struct.pack("<dddd", arr.x_grid.origin, arr.x_grid.spacing,
                             arr.omega_grid.origin, arr.omega_grid.spacing))
        inter = np.empty((arr.values.size, 2))
        inter[:, 0] = arr.values.real.ravel()
        inter[:, 1] = arr.values.imag.ravel()
        fh.write(inter.astype("<f8").tobytes())


def read_binary_raw(path):
    """Read a TFQ1 dump: (header dict, complex matrix)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"not a TFQ1 dump (magic {magic!r})")
        n_x, n_om = struct.unpack("<II", fh.read(8))
        x0, dx, om0, dom = struct.unpack("<dddd", fh.read(32))
        data = np.frombuffer(fh.read(n_x * n_om * 16), dtype="<f8").reshape(-1, 2)
    values = (data[:, 0] + 1j * data[:, 1]).reshape(n_x, n_om)
    header = {"n_x": n_x, "n_omega": n_om, "x_origin": x0, "x_spacing": dx,
              "omega_origin": om0, "omega_spacing": dom}
    return header, values


def read_phase_space_binary(path) -> PhaseSpaceArray:
    header, values = read_binary_raw(path)
    return PhaseSpaceArray(Grid(header["n_x"], header["x_spacing"], header["x_origin"]),
                           Grid(header["n_omega"], header["omega_spacing"],
                                header["omega_origin"]),
                           values)


def write_gabor_matrix_binary(M: GaborMatrix, path):
    """Gabor matrix in the TFQ1 byte layout: dims are the lattice count on
    both axes, spacings carry (alpha, beta), origins the first lattice point;
    entries follow lattice enumeration order (read back with read_binary_raw)."""
    lat = M.lattice
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", lat.count, lat.count))
        fh.write(struct.pack("<dddd", -lat.radius * lat.alpha, lat.alpha,
                             -lat.radius * lat.beta, lat.beta))
        inter = np.empty((M.entries.size, 2))
        inter[:, 0] = M.entries.real.ravel()
        inter[:, 1] = M.entries.imag.ravel()
        fh.write(inter.astype("<f8").tobytes())


def write_gabor_matrix_csv(M: GaborMatrix, path, meta: dict | None = None):
    lines = _comment_lines(meta)
    lines.append("lambda_k,lambda_l,mu_k,mu_l,re,im,abs")
    idx = M.lattice.indices()
    for i in range(M.lattice.count):
        for j in range(M.lattice.count):
            e = M.entries[i, j]
            lines.append(f"{idx[i, 0]},{idx[i, 1]},{idx[j, 0]},{idx[j, 1]},"
                         f"{format_float(e.real)},{format_float(e.imag)},"
                         f"{format_float(abs(e))}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_envelope_csv(h: LatticeArray, path, meta: dict | None = None):
    lines = _comment_lines(meta)
    lines.append("k1,k2,value")
    idx = h.lattice.indices()
    for i in range(h.lattice.count):
        lines.append(f"{idx[i, 0]},{idx[i, 1]},{format_float(abs(h.values[i]))}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def decay_report_dict(rep) -> dict:
    """JSON-ready view of a DecayReport (envelope serialized separately)."""
    return {
        "schema_version": JSON_SCHEMA_VERSION,
        "tau": rep.tau,
        "m": rep.m,
        "fitted_order": rep.fitted_order,
        "seminorm_used": rep.seminorm_used,
        "bound_constant": rep.bound_constant,
        "noninteger_s": rep.noninteger_s,
        "noninteger_bound_constant": rep.noninteger_bound_constant,
        "envelope_norms": {f"q={q:g},s={s:g}": v
                           for (q, s), v in sorted(rep.envelope_norms.items())},
    }


def write_json(obj: dict, path):
    with open(path, "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")
