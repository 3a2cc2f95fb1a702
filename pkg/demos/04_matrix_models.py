"""Matrix models of embedded points and the instability predicates.

A point is one <y, [c : phi]> per evaluation point.  Points presenting
flag-adapted Higgs data satisfy the coordinate inequalities of their type's
instability vector (the step-1 predicate), retract onto the graded locus by
zeroing the strictly-above coordinates, and their graded blocks pass the
torus semistability test (step 2) whenever the block data is in general
position.
"""

from higgsstrata import (
    CurveContext,
    Factor,
    FlagShape,
    HiggsDatum,
    HNType,
    ModelPoint,
    beta_of_type,
    coordinates,
    from_higgs_data,
    membership,
    nilpotent_commutant_dim,
    retract_p_beta,
    unipotent_stabilizer_dim,
    verify_step1,
    verify_step2,
)

ctx = CurveContext(rank=2, degree=7, genus=2, npoints=1)
tau = HNType(((1, 4), (1, 3)))
beta = beta_of_type(tau, ctx)

# Flag-adapted data: y maps the first three sections onto the first fibre
# line, and the stored Higgs matrix is block lower triangular (the
# presentation of a filtration-preserving field).
y = [[1, 1, 1, 2, 0], [0, 0, 0, 1, 1]]
phi = [[2, 0], [5, 3]]
point = from_higgs_data(HiggsDatum(tau, ctx, (Factor(y, 1, phi),)))

print("membership:", membership(point, beta, ctx).value)
report = verify_step1(point, beta, ctx)
print("step 1 passes:", report.passed, " equality witness:", report.equality_witness.to_json())

# The retraction zeroes exactly the coordinates pairing strictly above the
# squared norm; on matrices it block-diagonalises y and phi.
graded = retract_p_beta(point, beta, ctx)
print("retracted y:", [[str(x) for x in row] for row in graded.factors[0].y])
print("retracted phi:", [[str(x) for x in row] for row in graded.factors[0].phi])
print("retraction is idempotent:", retract_p_beta(graded, beta, ctx) == graded)
print("graded membership:", membership(graded, beta, ctx).value)

# Step 2: each graded block must contain its twisted character in the hull of
# its supported weights.  A zero column in a block breaks that and produces an
# exact separating direction.
s2 = verify_step2(point, beta, ctx)
print("step 2 passes:", s2.passed)
bad = ModelPoint((Factor([[1, 1, 0, 0, 0], [0, 0, 0, 1, 1]], 1, [[2, 0], [0, 3]]),))
s2_bad = verify_step2(bad, beta, ctx)
print("degenerate block fails with witness:", s2_bad.blocks[0].witness)

# Stabiliser dimensions: a field with distinct scalar blocks commutes with no
# lowering endomorphism; the zero field commutes with all of them.
flag = FlagShape(beta.m_blocks)
print("unipotent stabiliser of the point:", unipotent_stabilizer_dim(point, flag, ctx))
print("lowering commutant, distinct scalars:", nilpotent_commutant_dim(FlagShape((1, 1)), [[[2, 0], [0, 3]]]))
print("lowering commutant, zero field:    ", nilpotent_commutant_dim(FlagShape((1, 1)), [[[0, 0], [0, 0]]]))

# The total coordinate table of the small point, nonzero entries only.
table = coordinates(point, ctx)
print(f"{len(table.support())} of {len(table.values)} coordinates are nonzero")
