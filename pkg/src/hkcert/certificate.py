"""Certificates: a full record of one pipeline run, plus the independent verifier.

Every integer is serialized as a decimal string so consumers never face
64-bit overflow; the parser accepts plain JSON integers as well.  The
verifier recomputes each predicate from the instance and the recorded
parameters alone.  Recorded parameters make verification search-free: the
verifier evaluates, it never searches.  A content digest over the canonical
serialization guards fields (budgets, tool version, C0 headroom) whose
mutation would otherwise yield a different-but-consistent certificate.
"""

from __future__ import annotations

import hashlib
import json
from math import gcd

from . import obstruction
from .construction import (
    ConstructionRecord,
    MukaiVector,
    canonical_degree_class,
    rank_factor,
)
from .instance import (
    BrauerClass,
    CheckResult,
    HKInstance,
    b_field_class,
    brauer_equal,
    pic_coordinates,
    validate_instance,
)
from .lattice import (
    DELTA_INDEX,
    Isometry,
    RationalClass,
    acts_trivially_on_discriminant,
    build_lambda,
    divisibility,
    norm,
    pair,
)

SCHEMA_VERSION = "hkcert/1"
TOOL_VERSION = "0.1.0"


class CertificateFormatError(ValueError):
    """The file is not a structurally valid certificate or instance."""


# ---------------------------------------------------------------------------
# integer <-> decimal string helpers

def _enc_int(x):
    return str(int(x))


def _dec_int(x, what="integer"):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise CertificateFormatError(f"{what}: expected an integer or decimal string")
    try:
        return int(x)
    except ValueError:
        raise CertificateFormatError(f"{what}: bad integer {x!r}") from None


def _enc_vec(v):
    return [_enc_int(c) for c in v.coords]


def _dec_vec(L, data, what="vector"):
    if not isinstance(data, list) or len(data) != L.rank:
        raise CertificateFormatError(f"{what}: expected {L.rank} coordinates")
    return L.vector([_dec_int(c, what) for c in data])


def _enc_mat(rows):
    return [[_enc_int(x) for x in row] for row in rows]


# ---------------------------------------------------------------------------
# instance files

def instance_to_payload(inst: HKInstance):
    return {
        "n": _enc_int(inst.n),
        "pic_basis": [_enc_vec(p) for p in inst.pic_basis],
        "W": _enc_vec(inst.W),
        "B": _enc_vec(inst.B),
        "d": _enc_int(inst.d),
        "C0": _enc_int(inst.C0),
    }


def instance_from_payload(data) -> HKInstance:
    if not isinstance(data, dict):
        raise CertificateFormatError("instance: expected a JSON object")
    for key in ("n", "pic_basis", "W", "B", "d", "C0"):
        if key not in data:
            raise CertificateFormatError(f"instance: missing field {key!r}")
    n = _dec_int(data["n"], "n")
    if n < 2:
        raise CertificateFormatError(f"instance: n must be >= 2, got {n}")
    L = build_lambda(n)
    if not isinstance(data["pic_basis"], list) or not data["pic_basis"]:
        raise CertificateFormatError("instance: pic_basis must be a nonempty list")
    pic = tuple(_dec_vec(L, row, "pic_basis") for row in data["pic_basis"])
    inst = HKInstance(
        n=n,
        pic_basis=pic,
        W=_dec_vec(L, data["W"], "W"),
        B=_dec_vec(L, data["B"], "B"),
        d=_dec_int(data["d"], "d"),
        C0=_dec_int(data["C0"], "C0"),
    )
    if inst.d < 1 or inst.C0 < 1:
        raise CertificateFormatError("instance: d and C0 must be positive")
    return inst


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def read_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(f"not valid JSON: {exc}") from None


# ---------------------------------------------------------------------------
# certificates

def _canonical_dumps(payload):
    return json.dumps(payload, separators=(",", ":"), sort_keys=True)


def compute_digest(payload):
    body = {k: v for k, v in payload.items() if k != "digest"}
    return "sha256:" + hashlib.sha256(_canonical_dumps(body).encode("utf-8")).hexdigest()


def certificate_payload(inst: HKInstance, rec: ConstructionRecord, wall, budgets):
    checks = [{"name": c.name, "ok": bool(c.ok), "details": c.details} for c in rec.checks]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": TOOL_VERSION,
        "instance": instance_to_payload(inst),
        "record": {
            "A": _enc_vec(rec.A),
            "omega": _enc_vec(rec.omega),
            "u": _enc_int(rec.u),
            "C1": _enc_int(rec.C1),
            "g": _enc_int(rec.g),
            "t": _enc_int(rec.t),
            "e": _enc_int(rec.e),
            "H2": _enc_int(rec.H2),
            "v0": {"r": _enc_int(rec.v0.r), "m": _enc_int(rec.v0.m), "s": _enc_int(rec.v0.s)},
            "D": _enc_vec(rec.D),
            "source": _enc_vec(rec.source),
            "target": _enc_vec(rec.target),
            "sigma": _enc_mat(rec.sigma.matrix),
            "epsilon": _enc_int(rec.epsilon),
            "rk_un": _enc_int(rec.rk_un),
            "alpha_x": {
                "num": _enc_vec(rec.alpha_x.representative.numerator),
                "den": _enc_int(rec.alpha_x.representative.denominator),
            },
        },
        "wall": {
            "g": _enc_int(wall.g),
            "C1": _enc_int(wall.C1),
            "C0": _enc_int(wall.C0),
            "tested_a": [[_enc_int(a), _enc_int(r)] for a, r in wall.tested_a],
            "verdict": bool(wall.verdict),
        },
        "checks": checks,
        "budgets": {
            "coeff_bound": _enc_int(budgets["coeff_bound"]),
            "u_budget": _enc_int(budgets["u_budget"]),
            "t_budget": _enc_int(budgets["t_budget"]),
            "isometry_budget": _enc_int(budgets["isometry_budget"]),
        },
    }
    payload["digest"] = compute_digest(payload)
    return payload


def _require(data, key, what):
    if not isinstance(data, dict) or key not in data:
        raise CertificateFormatError(f"{what}: missing field {key!r}")
    return data[key]


def verify_payload(payload):
    """Recompute every predicate of a certificate.  Returns a CheckResult list.

    Structural problems raise CertificateFormatError (CLI exit 2); failed
    predicates come back as entries with ok=False (CLI exit 1).
    """
    checks = []

    def add(name, ok, details=""):
        checks.append(CheckResult(name, bool(ok), details))

    if not isinstance(payload, dict):
        raise CertificateFormatError("certificate: expected a JSON object")
    recorded_digest = _require(payload, "digest", "certificate")
    add("digest", recorded_digest == compute_digest(payload), "content digest")
    add("schema_version", _require(payload, "schema_version", "certificate") == SCHEMA_VERSION)

    inst = instance_from_payload(_require(payload, "instance", "certificate"))
    L = inst.lattice
    for c in validate_instance(inst):
        add("instance_" + c.name, c.ok, c.details)

    rec = _require(payload, "record", "certificate")
    A = _dec_vec(L, _require(rec, "A", "record"), "A")
    omega = _dec_vec(L, _require(rec, "omega", "record"), "omega")
    D = _dec_vec(L, _require(rec, "D", "record"), "D")
    u = _dec_int(_require(rec, "u", "record"), "u")
    C1 = _dec_int(_require(rec, "C1", "record"), "C1")
    g = _dec_int(_require(rec, "g", "record"), "g")
    t = _dec_int(_require(rec, "t", "record"), "t")
    e = _dec_int(_require(rec, "e", "record"), "e")
    H2 = _dec_int(_require(rec, "H2", "record"), "H2")
    v0f = _require(rec, "v0", "record")
    r_ = _dec_int(_require(v0f, "r", "v0"), "r")
    m_ = _dec_int(_require(v0f, "m", "v0"), "m")
    s_ = _dec_int(_require(v0f, "s", "v0"), "s")
    epsilon = _dec_int(_require(rec, "epsilon", "record"), "epsilon")
    rk_un = _dec_int(_require(rec, "rk_un", "record"), "rk_un")

    add("class_a_in_pic", pic_coordinates(inst, A) is not None)
    add("class_a_divisibility", not A.is_zero() and divisibility(A) == 1)
    add("class_a_pairing", pair(A, inst.W) == C1 and C1 > 0, f"(A,W) = {pair(A, inst.W)}")
    add("omega_in_pic", pic_coordinates(inst, omega) is not None)
    add("omega_orthogonal", pair(omega, inst.W) == 0)
    add("omega_positive", norm(omega) > 0, f"norm {norm(omega)}")

    add("divisor_formula", u >= 1 and D == A + u * omega)
    add("divisor_divisibility", not D.is_zero() and divisibility(D) == 1)
    add("divisor_norm", norm(D) == 2 * g, f"norm {norm(D)} vs 2g = {2 * g}")
    add("divisor_bound", g > inst.C0 * C1, f"g = {g}, C0*C1 = {inst.C0 * C1}")
    add("divisor_pairing_w", pair(D, inst.W) == C1)
    add("divisor_pairing_b", pair(D, inst.B) == 0)

    twist = D + 4 * g * t * inst.d * inst.B
    add("twist_divisibility", t >= 1 and divisibility(twist) == 1)
    add("e_matches_b", norm(inst.B) == 2 * e, f"norm(B) = {norm(inst.B)}")

    s_formula = 1 + 4 * g * t * t * inst.d**4 * (inst.n - 1) + 16 * g * t * t * inst.d**2 * e
    add("mukai_s_formula", s_ == s_formula)
    add("mukai_r_formula", r_ == 16 * g * t * t * inst.d**4)
    add("mukai_m_formula", m_ == 4 * t * inst.d**2)
    add("degree_formula", H2 == 2 * g * s_formula, f"H2 = {H2}")
    v0 = MukaiVector(r=r_, m=m_, s=s_, H2=H2)
    add("mukai_isotropic", v0.self_pairing() == 0, f"v0^2 = {v0.self_pairing()}")
    add("mukai_gcd_rs", gcd(r_, s_) == 1)
    add("mukai_rank", r_ >= 2)
    stab = 4 * g * t * inst.d**2
    add("mukai_stability", stab >= 1 and (H2 // 2 + 1) % stab != 0)
    add("rank_factor", rk_un == rank_factor(inst.n, r_))

    source = _dec_vec(L, _require(rec, "source", "record"), "source")
    target = _dec_vec(L, _require(rec, "target", "record"), "target")
    h = canonical_degree_class(L, H2)
    delta = L.basis_vector(DELTA_INDEX)
    add("source_formula", source == h - (2 * g * t * inst.d**2) * delta)
    add("target_formula", target == D + (4 * g * t * inst.d) * inst.B)
    add("transport_norms", norm(source) == norm(target), f"{norm(source)} vs {norm(target)}")
    add("transport_div_source", divisibility(source) == 1)
    add("transport_div_target", divisibility(target) == 1)

    sig_rows = _require(rec, "sigma", "record")
    if not isinstance(sig_rows, list) or len(sig_rows) != L.rank:
        raise CertificateFormatError("record: sigma must be a rank x rank matrix")
    sig_mat = []
    for row in sig_rows:
        if not isinstance(row, list) or len(row) != L.rank:
            raise CertificateFormatError("record: sigma row has wrong length")
        sig_mat.append(tuple(_dec_int(x, "sigma") for x in row))
    sig_mat = tuple(sig_mat)
    sigma = None
    try:
        sigma = Isometry(sig_mat, L)
        add("sigma_gram_identity", True)
    except ValueError as exc:
        add("sigma_gram_identity", False, str(exc))
    add("epsilon_sign", epsilon in (1, -1), f"epsilon = {epsilon}")
    if sigma is not None:
        add("sigma_determinant", sigma.det() == 1)
        add("sigma_discriminant_trivial", acts_trivially_on_discriminant(sigma))
        add(
            "transport_maps",
            epsilon in (1, -1) and sigma.apply(source) == epsilon * target,
        )

        af = _require(rec, "alpha_x", "record")
        alpha_num = _dec_vec(L, _require(af, "num", "alpha_x"), "alpha_x.num")
        alpha_den = _dec_int(_require(af, "den", "alpha_x"), "alpha_x.den")
        if alpha_den == 0:
            raise CertificateFormatError("alpha_x: zero denominator")
        recorded_alpha = BrauerClass(RationalClass(alpha_num, alpha_den), inst.pic_basis)
        den = 4 * g * t * inst.d**2
        q = RationalClass(epsilon * h - (den // 2) * delta, den)
        recomputed = BrauerClass(-sigma.apply_rational(q), inst.pic_basis)
        add(
            "alpha_matches_record",
            recomputed.representative == recorded_alpha.representative,
        )
        add("alpha_is_b_field", brauer_equal(recomputed, b_field_class(inst)))

    wall = _require(payload, "wall", "certificate")
    wg = _dec_int(_require(wall, "g", "wall"), "wall.g")
    wc1 = _dec_int(_require(wall, "C1", "wall"), "wall.C1")
    wc0 = _dec_int(_require(wall, "C0", "wall"), "wall.C0")
    add("wall_parameters", wg == g and wc1 == C1 and wc0 == inst.C0)
    try:
        recomputed_wall = obstruction.wall_certificate(wg, wc1, wc0)
        tested = [[_enc_int(a), _enc_int(r)] for a, r in recomputed_wall.tested_a]
        add("wall_enumeration", tested == _require(wall, "tested_a", "wall"))
        add(
            "wall_verdict",
            recomputed_wall.verdict and bool(_require(wall, "verdict", "wall")),
        )
    except ValueError as exc:
        add("wall_enumeration", False, str(exc))

    recorded_checks = _require(payload, "checks", "certificate")
    if not isinstance(recorded_checks, list):
        raise CertificateFormatError("certificate: checks must be a list")
    add(
        "recorded_checks_true",
        all(isinstance(c, dict) and c.get("ok") is True for c in recorded_checks),
    )
    return checks
