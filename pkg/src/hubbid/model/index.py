"""Typed handles for every decision-variable family of the hub MILP."""

from __future__ import annotations

from dataclasses import dataclass, field

# resource names as they appear inside variable names (no '-' so the names
# survive LP-format lexing)
RESOURCE_TOKEN = {"CPU": "CPU", "GPU": "GPU", "MEM-CPU": "MEMCPU", "MEM-GPU": "MEMGPU"}


@dataclass
class VariableIndex:
    """Maps index tuples to model variable ids, one dict per family.

    Scenario and step indices are integers; clusters are referenced by id and
    resources by their canonical names. ``e_bess`` and ``e_nonren`` are keyed
    by the end-of-step time 1..T (the initial state is a fixed constant, not
    a variable).
    """

    # workload
    u: dict[tuple[int, int, str, str], int] = field(default_factory=dict)
    v_inelastic: dict[tuple[int, int, str, str], int] = field(default_factory=dict)
    v_flexible: dict[tuple[int, str, str], int] = field(default_factory=dict)
    # power and heat
    p_dc: dict[tuple[int, int], int] = field(default_factory=dict)
    q_rec: dict[tuple[int, int], int] = field(default_factory=dict)
    q_orc_in: dict[tuple[int, int], int] = field(default_factory=dict)
    q_sold: dict[tuple[int, int], int] = field(default_factory=dict)
    q_lost: dict[tuple[int, int], int] = field(default_factory=dict)
    # ORC
    p_orc: dict[tuple[int, int], int] = field(default_factory=dict)
    lam: dict[tuple[int, int, int], int] = field(default_factory=dict)
    # BESS
    p_bess_c: dict[tuple[int, int], int] = field(default_factory=dict)
    p_bess_d: dict[tuple[int, int], int] = field(default_factory=dict)
    z_bess: dict[tuple[int, int], int] = field(default_factory=dict)
    p_bess_ac: dict[tuple[int, int], int] = field(default_factory=dict)
    e_bess: dict[tuple[int, int], int] = field(default_factory=dict)
    a_bess: dict[tuple[int, int], int] = field(default_factory=dict)
    # PV
    p_pv: dict[tuple[int, int], int] = field(default_factory=dict)
    # market
    p_gcp: dict[tuple[int, int], int] = field(default_factory=dict)
    p_da: dict[int, int] = field(default_factory=dict)
    p_imb: dict[tuple[int, int], int] = field(default_factory=dict)
    p_plus: dict[tuple[int, int], int] = field(default_factory=dict)
    p_minus: dict[tuple[int, int], int] = field(default_factory=dict)
    z_imb: dict[tuple[int, int], int] = field(default_factory=dict)
    # renewable share
    e_nonren: dict[tuple[int, int], int] = field(default_factory=dict)
    e_dc: dict[int, int] = field(default_factory=dict)
    v_ren: dict[int, int] = field(default_factory=dict)
    # risk
    zeta: int | None = None
    eta: dict[int, int] = field(default_factory=dict)


def vname(family: str, w: int | None = None, t: int | None = None,
          c: int | None = None, res: str | None = None, i: int | None = None) -> str:
    """Deterministic variable name: family plus zero-padded index tuple."""
    parts = []
    if w is not None:
        parts.append(f"w{w:03d}")
    if t is not None:
        parts.append(f"t{t:02d}")
    if c is not None:
        parts.append(f"c{c:02d}")
    if res is not None:
        parts.append(RESOURCE_TOKEN[res])
    if i is not None:
        parts.append(f"i{i:02d}")
    return f"{family}({','.join(parts)})" if parts else family
