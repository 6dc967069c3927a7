"""Kernels, eigenspaces and the two structure theorems on the round Spin(7)/G2.

Everything is computed block by block; a block of weight lambda contributes
dim V_lambda times its block dimension to the global count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..clifford import SPIN_DIM
from ..report import CheckReport, bool_check, residual_check
from . import identities as ids
from . import operators as op
from .homspace import BUNDLE_TAGS, bundle, weight_data
from .weights import as_weight, enumerate_weights

RESIDUAL_TOL = 1e-8
EIGEN_DIGITS = 9
EINSTEIN_CONSTANT = 6
INSTABILITY_EIGENVALUE = Fraction(13, 4)

# operator whose spectrum is reported for each bundle
SPECTRAL_OPERATORS = {
    "Functions": "laplace",
    "OneForms": "laplace",
    "TwoForms7": "g2-laplace",
    "TwoForms14": "g2-laplace",
    "ThreeForms27": "g2-laplace",
    "Sym0": "g2-laplace",
    "Spinors": "dirac",
    "SpinorValued1Forms": "twisted-dirac",
    "S32": "rarita-schwinger",
}

_ALIASES = {tag.lower(): tag for tag in BUNDLE_TAGS}
_ALIASES.update({"oneforms": "OneForms", "1forms": "OneForms", "twoforms7": "TwoForms7",
                 "twoforms14": "TwoForms14", "threeforms27": "ThreeForms27", "s32": "S32",
                 "spinorvalued1forms": "SpinorValued1Forms", "spintensors": "SpinorValued1Forms",
                 "sym0": "Sym0", "spinors": "Spinors", "functions": "Functions"})


def bundle_tag(name):
    """Resolve a bundle name such as 'functions', 'three-forms27' or 'S32'."""
    key = "".join(ch for ch in name.lower() if ch.isalnum())
    if key not in _ALIASES:
        raise KeyError(f"unknown bundle {name!r}; expected one of {', '.join(BUNDLE_TAGS)}")
    return _ALIASES[key]


# --- block operators of one weight ------------------------------------------------

class WeightOperators:
    """The named block operators used by the spectral computations at one weight."""

    def __init__(self, w):
        self.calc = op.BlockCalculus(as_weight(w))
        self.weight = self.calc.weight
        self._cache = {}

    def blk(self, tag):
        return self.calc.block(tag)

    def _get(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def spectral_operator(self, tag):
        c = self.calc
        kind = SPECTRAL_OPERATORS[tag]
        mod = bundle(tag).module
        B = self.blk(tag)
        fns = {
            "laplace": lambda X: c.laplace(X, mod),
            "g2-laplace": lambda X: c.laplace_bar(X, mod),
            "dirac": lambda X: c.dirac(X),
            "twisted-dirac": lambda X: c.twisted_dirac(X),
            "rarita-schwinger": lambda X: c.twisted_dirac(X),
        }
        return self._get(("spec", tag), lambda: op.block_operator(B, B, fns[kind], kind,
                                                                  project=kind == "rarita-schwinger"))

    def killing(self):
        c = self.calc
        return self._get("killing", lambda: op.block_operator(self.blk("Spinors"), self.blk("SpinorValued1Forms"),
                                                              c.killing, "killing"))

    def d1(self):
        c = self.calc
        return self._get("d1", lambda: op.block_operator(self.blk("OneForms"), self.blk("TwoTensors"),
                                                         c.d1_operator, "d1"))

    def star_d(self):
        """*d from Omega^3_27 to all 3-forms."""
        c = self.calc
        return self._get("star_d", lambda: op.block_operator(self.blk("ThreeForms27"), self.blk("ThreeForms"),
                                                             c.star_d, "*d"))

    def inclusion27(self):
        return self._get("incl27", lambda: op.block_operator(self.blk("ThreeForms27"), self.blk("ThreeForms"),
                                                             lambda X: X.copy(), "incl"))

    def delta7(self):
        """gamma -> (delta gamma)_7 on Omega^3_27."""
        c = self.calc
        P7 = bundle("TwoForms7").projector
        return self._get("delta7", lambda: op.block_operator(self.blk("ThreeForms27"), self.blk("TwoForms7"),
                                                             lambda X: np.matmul(P7, c.delta(X, 3)), "delta7"))

    def laplace27(self):
        c = self.calc
        return self._get("lap27", lambda: op.block_operator(self.blk("ThreeForms27"), self.blk("ThreeForms"),
                                                            lambda X: c.laplace(X, "L3"), "laplace"))

    def d_delta27(self):
        c = self.calc
        return self._get("ddelta27", lambda: op.block_operator(self.blk("ThreeForms27"), self.blk("ThreeForms"),
                                                               lambda X: c.d(c.delta(X, 3), 2), "d delta"))

    def rarita_schwinger(self):
        return self.spectral_operator("S32")

    def twisted_dirac_on_s32(self):
        c = self.calc
        return self._get("dtm32", lambda: op.block_operator(self.blk("S32"), self.blk("SpinorValued1Forms"),
                                                            c.twisted_dirac, "D_TM|S32"))

    def deformation(self):
        """(D_TM - 7/2) Psi^{(H, kappa_0)} on trace-free symmetric H."""
        c = self.calc
        return self._get("deform", lambda: op.block_operator(self.blk("Sym0"), self.blk("SpinorValued1Forms"),
                                                             lambda H: ids.deformation_condition(c, H), "deform"))

    def divergence(self):
        c = self.calc
        return self._get("div", lambda: op.block_operator(self.blk("Sym0"), self.blk("OneForms"),
                                                          c.divergence_tt, "delta"))

    def r_h_operator(self):
        """H -> 3 sum_i A_{e_i *} nablabar_{e_i} H + H."""
        c = self.calc
        return self._get("rh", lambda: op.block_operator(
            self.blk("Sym0"), self.blk("TwoTensors"),
            lambda H: 3.0 * c.cross_derivative(H, "TT") + H,
            "3A.nablabar + 1"))

    def laplace_sym0(self):
        c = self.calc
        return self._get("lapH", lambda: op.block_operator(self.blk("Sym0"), self.blk("TwoTensors"),
                                                           lambda H: c.laplace(H, "TT"), "laplace"))

    def inclusion_sym0(self):
        return self._get("inclH", lambda: op.block_operator(self.blk("Sym0"), self.blk("TwoTensors"),
                                                            lambda H: H.copy(), "incl"))

    # eigenspaces of *d restricted to Omega^3_27
    def star_d_eigenspace(self, lam, constrained=True):
        ops = [self.star_d() - self.inclusion27().scaled(lam)]
        if constrained:
            ops.append(self.delta7())
        return op.null_space(*ops)


def _residual(*ops):
    return max([o.residual for o in ops] + [0.0])


def _star_d_spectrum(W, tol=RESIDUAL_TOL):
    """Eigenvalues of *d inside {gamma in Omega^3_27 : (delta gamma)_7 = 0, *d gamma in Omega^3_27}."""
    B = W.blk("ThreeForms27")
    if B.block_dim == 0:
        return []
    P = bundle("ThreeForms27").projector
    off = op.block_operator(B, W.blk("ThreeForms"),
                            lambda X: W.calc.star_d(X) - np.matmul(P, W.calc.star_d(X)), "*d off-type")
    N = op.null_space(W.delta7(), off)
    if N.shape[1] == 0:
        return []
    inner = op.block_operator(B, B, W.calc.star_d, project=True).matrix
    M = N.T @ inner @ N
    vals = np.linalg.eigvalsh(0.5 * (M + M.T))
    return sorted(round(float(v), EIGEN_DIGITS) + 0.0 for v in vals)


def _eigenvalues(W, tag):
    B = W.blk(tag)
    if B.block_dim == 0:
        return [], 0.0
    O = W.spectral_operator(tag)
    sym = O.symmetry_defect()
    vals = np.linalg.eigvalsh(0.5 * (O.matrix + O.matrix.T))
    return [round(float(v), EIGEN_DIGITS) + 0.0 for v in vals], max(sym, O.residual)


def _group(values):
    out = []
    for v in values:
        if out and abs(out[-1][0] - v) < 1e-6:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return out


def _weight_row(w):
    W = WeightOperators(w)
    wd = weight_data(w)
    dims = {tag: W.blk(tag).block_dim for tag in BUNDLE_TAGS}
    row = {"weight": list(w), "dimV": wd.dim, "blockDims": dims}

    kill = op.nullity(W.killing())
    row["killing"] = kill
    dirac_minus = op.kernel_dim(W.spectral_operator("Spinors"), -3.5) if dims["Spinors"] else 0
    row["diracMinusSevenHalves"] = dirac_minus
    row["d1"] = op.nullity(W.d1())
    row["d3"] = W.star_d_eigenspace(-4.0).shape[1] if dims["ThreeForms27"] else 0
    NR = W.star_d_eigenspace(-0.5) if dims["ThreeForms27"] else np.zeros((0, 0))
    row["rGamma"] = NR.shape[1] if dims["ThreeForms27"] else 0

    # Rarita-Schwinger operator and D_TM on S32
    if dims["S32"]:
        Q = W.rarita_schwinger()
        NQ = op.null_space(Q)
        ND = op.null_space(W.twisted_dirac_on_s32())
        row["kerQ"] = NQ.shape[1]
        row["kerTwistedDiracS32"] = ND.shape[1]
        row["qSymmetryDefect"] = Q.symmetry_defect()
        # the kappa_0 row of elements of ker D_TM in S32 (a 1-form) has to vanish
        B32 = W.blk("S32")
        elems = np.tensordot(ND.T, B32.basis, axes=(1, 0)) if ND.shape[1] else np.zeros((0, SPIN_DIM * 7, B32.basis.shape[2]))
        row["kerS32OneFormComponent"] = float(np.abs(elems.reshape(len(elems), SPIN_DIM, 7, -1)[:, 0]).max()) if len(elems) else 0.0
    else:
        row["kerQ"] = row["kerTwistedDiracS32"] = 0
        row["qSymmetryDefect"] = 0.0
        row["kerS32OneFormComponent"] = 0.0

    # the constrained spaces on Omega^3_27
    if dims["ThreeForms27"]:
        incl = W.inclusion27()
        lap, sd, dd, d7 = W.laplace27(), W.star_d(), W.d_delta27(), W.delta7()
        large = op.null_space((lap.scaled(4.0) + sd.scaled(8.0)) + incl.scaled(3.0), d7)
        rs = op.null_space((dd.scaled(4.0) + sd.scaled(6.0)) + incl.scaled(3.0), d7)
        half = NR
        three_half = W.star_d_eigenspace(-1.5)
        ddpiece = op.null_space(dd + incl.scaled(0.75), d7)
        row["largeSpace"] = large.shape[1]
        row["rsSpace"] = rs.shape[1]
        row["starDMinusHalf"] = half.shape[1]
        row["starDMinusThreeHalves"] = three_half.shape[1]
        row["dDeltaPiece"] = ddpiece.shape[1]
        summed = np.hstack([half, three_half, ddpiece])
        row["largeSpaceSpan"] = int(np.linalg.matrix_rank(np.hstack([large, summed]), tol=1e-8)) if summed.size or large.size else 0
        row["rsSpaceSpan"] = int(np.linalg.matrix_rank(np.hstack([rs, half, ddpiece]), tol=1e-8)) if rs.size or half.size or ddpiece.size else 0
        row["starDSpectrum"] = _star_d_spectrum(W)
        # R_gamma inside the 1/4-eigenspace of Delta and the -1/12-eigenspace of Delta bar
        lap_bar = op.block_operator(W.blk("ThreeForms27"), W.blk("ThreeForms27"),
                                    lambda X: W.calc.laplace_bar(X, "L3"))
        r_lap = float(np.abs((lap.matrix - 0.25 * incl.matrix) @ NR).max()) if NR.size else 0.0
        n27 = dims["ThreeForms27"]
        r_bar = float(np.abs((lap_bar.matrix + np.eye(n27) / 12.0) @ NR).max()) if NR.size else 0.0
        row["rGammaLaplaceResidual"] = max(r_lap, r_bar, _residual(lap, lap_bar))
    else:
        for key in ("largeSpace", "rsSpace", "starDMinusHalf", "starDMinusThreeHalves", "dDeltaPiece",
                    "largeSpaceSpan", "rsSpaceSpan"):
            row[key] = 0
        row["starDSpectrum"] = []
        row["rGammaLaplaceResidual"] = 0.0

    # Theorem A: H-part of the deformation space
    if dims["Sym0"]:
        NH = op.null_space(W.deformation(), W.divergence())
        row["deformationH"] = NH.shape[1]
        NRH = op.null_space(W.r_h_operator(), W.divergence())
        row["rH"] = NRH.shape[1]
        lapH, inclH = W.laplace_sym0(), W.inclusion_sym0()
        row["rHLaplaceResidual"] = float(np.abs((lapH.matrix - 3.25 * inclH.matrix) @ NRH).max()) if NRH.size else 0.0
        # i maps the H-kernel onto *d gamma = -4 gamma
        if NH.size:
            c = W.calc
            Hs = np.tensordot(NH.T, W.blk("Sym0").basis, axes=(1, 0))
            g = np.matmul(op.imap_matrix(), Hs)
            row["deformationToD3Residual"] = float(np.abs(c.star_d(g) + 4.0 * g).max())
        else:
            row["deformationToD3Residual"] = 0.0
    else:
        row["deformationH"] = row["rH"] = 0
        row["rHLaplaceResidual"] = row["deformationToD3Residual"] = 0.0

    # non-negativity of the Laplacian on one-forms (no -3/4 eigenvalue)
    if dims["OneForms"]:
        vals, _ = _eigenvalues(W, "OneForms")
        row["oneFormLaplaceMin"] = min(vals)
        row["oneFormMinusThreeQuarters"] = op.kernel_dim(W.spectral_operator("OneForms"), -0.75)
    else:
        row["oneFormLaplaceMin"] = None
        row["oneFormMinusThreeQuarters"] = 0

    eig = {}
    worst = 0.0
    for tag in BUNDLE_TAGS:
        vals, res = _eigenvalues(W, tag)
        worst = max(worst, res)
        eig[tag] = _group(vals)
    row["eigenvalues"] = eig
    row["assemblyResidual"] = max(worst, _residual(W.killing(), W.d1()))
    return row


@dataclass
class SpectralReport:
    max_level: int
    rows: list = field(default_factory=list)
    checks: CheckReport = field(default_factory=CheckReport)

    def row(self, w):
        w = list(as_weight(w))
        for r in self.rows:
            if r["weight"] == w:
                return r
        raise KeyError(tuple(w))

    def total(self, key):
        return sum(r["dimV"] * r[key] for r in self.rows)

    def spectrum(self, tag):
        """[(eigenvalue, total multiplicity)] over all weights, ascending."""
        acc = {}
        for r in self.rows:
            for v, m in r["eigenvalues"][tag]:
                key = round(v, 6) + 0.0
                acc[key] = acc.get(key, 0) + m * r["dimV"]
        return sorted(acc.items())

    def totals(self):
        keys = ("killing", "diracMinusSevenHalves", "d1", "d3", "rGamma", "rH", "kerQ", "kerTwistedDiracS32",
                "deformationH", "largeSpace", "rsSpace", "dDeltaPiece")
        return {k: self.total(k) for k in keys}

    def to_dict(self, bundle_filter=None):
        rows = []
        for r in self.rows:
            r = dict(r)
            if bundle_filter is not None:
                r["eigenvalues"] = {bundle_filter: r["eigenvalues"][bundle_filter]}
            rows.append(r)
        out = {"maxLevel": self.max_level, "rows": rows, "totals": self.totals()}
        tags = [bundle_filter] if bundle_filter else list(BUNDLE_TAGS)
        out["spectra"] = {t: [[v, m] for v, m in self.spectrum(t)] for t in tags}
        out.update(self.checks.to_dict())
        return out


def _consistency_checks(report, tol=RESIDUAL_TOL):
    out = CheckReport()
    for r in report.rows:
        w = tuple(r["weight"])
        out.add(residual_check("block-assembly", "sec-3", r["assemblyResidual"], tol, "", weight=w))
        out.add(bool_check("killing/dirac-eigenspace-agreement", "thm-A", r["killing"] == r["diracMinusSevenHalves"],
                           f"Killing kernel {r['killing']}, D eigenvalue -7/2 multiplicity {r['diracMinusSevenHalves']}",
                           weight=w))
        out.add(residual_check("r-gamma/laplace-eigenspaces", "corollary-5", r["rGammaLaplaceResidual"], tol,
                               "R_gamma in ker(Delta - 1/4) and ker(Deltabar + 1/12)", weight=w))
        ok = (r["largeSpace"] == r["starDMinusHalf"] + r["starDMinusThreeHalves"] + r["dDeltaPiece"]
              == r["largeSpaceSpan"] and r["dDeltaPiece"] == 0)
        out.add(bool_check("constrained-space/decomposition", "thm-B", ok,
                           f"dim {r['largeSpace']} = {r['starDMinusHalf']} + {r['starDMinusThreeHalves']} + "
                           f"{r['dDeltaPiece']} (d delta piece)", weight=w))
        ok = r["rsSpace"] == r["starDMinusHalf"] + r["dDeltaPiece"] == r["rsSpaceSpan"]
        out.add(bool_check("rarita-schwinger-space/decomposition", "thm-B", ok,
                           f"dim {r['rsSpace']} = {r['starDMinusHalf']} + {r['dDeltaPiece']}", weight=w))
        out.add(residual_check("ker-twisted-dirac-s32/one-form-part", "lemma-5", r["kerS32OneFormComponent"], tol,
                               f"dim ker D_TM in S32 = {r['kerTwistedDiracS32']}", weight=w))
        out.add(bool_check("one-forms/no-negative-eigenvalue", "lemma-5",
                           r["oneFormMinusThreeQuarters"] == 0 and (r["oneFormLaplaceMin"] is None
                                                                  or r["oneFormLaplaceMin"] >= -tol),
                           f"min eigenvalue {r['oneFormLaplaceMin']}", weight=w))
        out.add(residual_check("rarita-schwinger/symmetric", "sec-2.1-dirac-matrix", r["qSymmetryDefect"], tol,
                               "", weight=w))
    totals = report.totals()
    out.add(bool_check("killing/total", "thm-A", totals["killing"] == 8, f"total {totals['killing']}"))
    out.add(bool_check("d1/isomorphic-to-complement-of-kappa0", "sec-4-d1", totals["d1"] == totals["killing"] - 1,
                       f"dim D1 = {totals['d1']}, dim K+ = {totals['killing']}"))
    out.add(bool_check("rarita-schwinger/vanishing", "prop-6.1", totals["kerQ"] == 0, f"total {totals['kerQ']}"))
    return out


def spectral_report(max_level=3):
    """Per-weight dimensions, spectra and cross-consistency checks up to max_level."""
    report = SpectralReport(max_level)
    for w in enumerate_weights(max_level):
        report.rows.append(_weight_row(w))
    report.checks = _consistency_checks(report)
    return report


def theorem_check(which, max_level=3, report=None):
    """Per-block dimension equalities of the deformation theorem (A) or the Rarita-Schwinger theorem (B)."""
    which = which.upper()
    if which not in ("A", "B"):
        raise ValueError("which must be 'A' or 'B'")
    report = report or spectral_report(max_level)
    out = CheckReport()
    if which == "A":
        for r in report.rows:
            w = tuple(r["weight"])
            lhs = r["deformationH"] + r["killing"]
            out.add(bool_check("theorem-A/block-dimension", "thm-A", r["deformationH"] == r["d3"],
                               f"deformations {lhs} = D3 {r['d3']} + K+ {r['killing']}", weight=w))
            out.add(residual_check("theorem-A/i-maps-into-D3", "thm-A", r["deformationToD3Residual"], RESIDUAL_TOL,
                                   "*d i(H) = -4 i(H) on the H-kernel", weight=w))
        t = report.totals()
        out.add(bool_check("theorem-A/d1-vs-killing", "sec-4-d1", t["d1"] == t["killing"] - 1,
                           f"dim D1 = {t['d1']}, dim K+ - 1 = {t['killing'] - 1}"))
        out.data["totals"] = {"deformations": t["deformationH"] + t["killing"], "D3": t["d3"], "K+": t["killing"],
                              "D1": t["d1"]}
    else:
        for r in report.rows:
            w = tuple(r["weight"])
            out.add(bool_check("theorem-B/block-dimension", "thm-B", r["kerQ"] == r["rGamma"],
                               f"ker Q in S32 {r['kerQ']} = R_gamma {r['rGamma']}", weight=w))
        t = report.totals()
        out.add(bool_check("theorem-B/rarita-schwinger-total", "prop-6.1", t["kerQ"] == 0,
                           f"total Rarita-Schwinger dimension {t['kerQ']}"))
        out.data["totals"] = {"kerQ": t["kerQ"], "R_gamma": t["rGamma"]}
    return out


def instability_certificate(max_level=3, report=None, tol=RESIDUAL_TOL):
    """R_H inside the 13/4-eigenspace of Delta, the conjugated Laplacian identity and the instability verdict."""
    report = report or spectral_report(max_level)
    out = CheckReport()
    for r in report.rows:
        w = tuple(r["weight"])
        out.add(residual_check("instability/r-h-eigenvalue", "sec-6.2", r["rHLaplaceResidual"], tol,
                               f"dim R_H block {r['rH']}", weight=w))
        calc = op.BlockCalculus(w)
        out.add(ids._ambient_check(calc, ids._Terms(calc), "instability/conjugated-laplacian", "lemma-6.2",
                                   "ThreeForms27", ids._conjugated_laplacian, tol))
    constant = INSTABILITY_EIGENVALUE - 2 * EINSTEIN_CONSTANT
    out.add(bool_check("instability/certificate-constant", "sec-6.2", constant == Fraction(-35, 4) and constant < 0,
                       f"13/4 - 2*{EINSTEIN_CONSTANT} = {constant}"))
    total = report.total("rH")
    verdict = "no witness (R_H = 0)" if total == 0 else f"linearly unstable: dim R_H = {total}"
    out.add(bool_check("instability/verdict", "sec-6.2", True, verdict))
    out.data["verdict"] = verdict
    out.data["certificateConstant"] = str(constant)
    return out


spectralReport = spectral_report
theoremCheck = theorem_check
instabilityCertificate = instability_certificate
