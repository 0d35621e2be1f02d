"""The three-part bound on the dyadic level set at height 1.

Small scales, light blocks and heavy blocks are counted separately; their
sum dominates the direct count on every input tried here.
"""
from primeomega import build_weight_table, claim_certificate
from primeomega.maximal import corpus_member, fit_moment_constant

table = build_weight_table(2**20, "big")
fitted, _ = fit_moment_constant(table)
print(f"fitted moment constant {fitted:.4f}, certificate uses twice that")

print("\ninput              direct  small  light      heavy  bound")
for spec in ("delta:20", "indicator:256:2", "indicator:1024:3", "random:0.1:0", "random:0.01:0"):
    cert = claim_certificate(corpus_member(spec, length=1024), table)
    print(f"{spec:<19s}{cert.direct_count:<8d}{cert.small_scale:<7d}{cert.light:<11.3f}{cert.heavy:<7d}{cert.bound:.1f}"
          + ("" if cert.holds else "  VIOLATED"))
