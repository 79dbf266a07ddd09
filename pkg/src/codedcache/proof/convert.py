"""Turn a checked chain into an LP dual certificate.

The chain proves a*M + b*R - c = (aM + bR - start) + sum_k (e_k - e_{k+1}),
and every bracket is a nonnegative combination of LP rows:

* start: the cache-size and broadcast-size rows;
* SUBMOD: a conditional mutual information, expanded into elemental rows;
* MONO / FILECLOSE: monotonicity, expanded into elemental rows;
* DECODE: minus the decodability equality plus I(W; rest | Z_l, X_d);
* SYMM: the difference of two symmetry equalities (needs S and pi(S) in the
  same orbit of the LP's symmetry group);
* CONST_FLOOR: the file-independence equality.
"""

from __future__ import annotations

from fractions import Fraction

from ..lp.certificate import CertificateError, DualCertificate, cmi, mono_combination
from ..lp.ground import bits
from ..lp.problem import LpProblem
from ..model import Demand
from .chain import ChainError, ProofChain


class ConversionError(ChainError):
    pass


def chain_to_certificate(chain: ProofChain, problem: LpProblem) -> DualCertificate:
    gs = problem.gs
    if tuple(gs.labels) != tuple(chain.gs.labels):
        raise ConversionError(
            "chain and LP use different ground sets: " f"{list(chain.gs.labels)} vs {list(gs.labels)}"
        )
    cert = DualCertificate()
    for s, coef in chain.start.items():
        if s & gs.cache_bits:
            user = gs.cache_members(s)[0]
            cert.add_row(problem.index[("cache", user)], coef)
        else:
            d = gs.demand_members(s)[0]
            cert.add_row(problem.index[("broadcast", d.requests)], coef)
    for idx, step in enumerate(chain.steps, start=1):
        w = step.weight
        try:
            if step.rule == "SUBMOD":
                s, t = step.sets
                cmi(problem, bits(s & ~t), bits(t & ~s), s & t, w, cert)
            elif step.rule == "MONO":
                mono_combination(problem, step.sets[0], step.sets[1], w, cert)
            elif step.rule == "FILECLOSE":
                mono_combination(problem, step.sets[0], gs.all_files, w, cert)
            elif step.rule == "DECODE":
                (s,) = step.sets
                d = Demand(step.demand)
                base = gs.z(step.user) | gs.x(d)
                wf = gs.w(d[step.user])
                cert.add_row(problem.index[("decode", step.user, d.requests)], -w)
                rest = s & ~base
                if rest:
                    cmi(problem, bits(wf), bits(rest), base, w, cert)
            elif step.rule == "SYMM":
                (s,) = step.sets
                img = gs.permute(s, step.perm)
                if not problem.symmetry or problem.rep[s] != problem.rep[img]:
                    raise ConversionError(
                        f"step {idx} (SYMM # {step.tag}): H{gs.label(s)} and H{gs.label(img)} are not in the same"
                        " orbit of the LP symmetry group; build the LP with symmetry over a demand set closed"
                        " under this permutation"
                    )
                cert.add_row(problem.sym_form(s), w)
                cert.add_row(problem.sym_form(img), -w)
            elif step.rule == "CONST_FLOOR":
                cert.add_row(problem.index[("file", step.sets[0])], w)
        except (KeyError, CertificateError) as exc:
            raise ConversionError(f"step {idx} ({step.rule} # {step.tag}): no matching LP constraint ({exc})") from None
    return cert
