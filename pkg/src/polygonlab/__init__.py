"""Numerical laboratory for the sharp quantitative polygonal isoperimetric
inequality: deficit and variance functionals, the polygonal manifold, the
circulant Hessian spectrum, finite-difference derivative verification,
sharp-constant estimation and pocket-flip convexification.
"""

from .circulant import (
    BlockHessian,
    CirculantSystem,
    build_circulant,
    build_phi,
    min_eig_on_Z,
    quadratic_form,
    spectral_quadratic_form,
)
from .convexify import FlipTrace, convexify, flip, is_simple, pockets
from .derivatives import (
    DerivativeReport,
    deficit_gradient_at_star,
    deficit_hessian_at_star,
    grad_fd,
    hessian_fd,
    sigma_estimate,
    verify_hessian_phi,
)
from .errors import PolygonLabError
from .lab import (
    ConstantEstimate,
    Constants,
    InequalityReport,
    ScalingReport,
    SharpnessResult,
    estimate_cn,
    rayleigh_bound,
    scaling_check,
    sharpness_probe,
    verify,
    verify_vertices,
)
from .manifold import (
    ConstraintResiduals,
    TangentBasis,
    residuals,
    retract,
    sample,
    sample_near_star,
    tangent_basis_at_star,
)
from .polygon import (
    ManifoldPoint,
    PolygonSummary,
    VertexPolygon,
    from_vertices,
    side_lengths,
    star_point,
    summary,
    summary_of_vertices,
    to_manifold_point,
    to_vertices,
)

__version__ = "0.1.0"
