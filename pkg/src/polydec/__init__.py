"""Primal-to-primal discrete exterior calculus on polygonal surface meshes."""

from .cochains import (Cochain, CovectorField, ScalarField, TwoFormField, VectorField,
                       discretize, error_norms, flat, sharp)
from .mesh import PolygonMesh, build_mesh, face_geometry, incidence, mesh_spacing
from .operators import (SparseOperator, codifferential, contraction, exterior_derivative,
                        hodge_star, inner_product, inner_product_matrix, laplacian,
                        lie_derivative, wedge)

__version__ = "0.1.0"
