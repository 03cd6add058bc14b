"""radialdim: certified inverse branches, conformal IFS dimension
estimates, and constructive hyperbolic-set lower bounds on the
Riemann sphere."""

from .errors import (BracketFailure, ConfigParseError, DegenerateFit,
                     DomainError, EnumerationOverflow, InsufficientData,
                     InsufficientMass, NewtonDivergence, NoQualifyingBranch,
                     RadialDimError, RootFindingFailure, SearchExhausted,
                     UnivalenceFailure)
from .sphere import (INF, SphericalDisk, antipode, disk_contains,
                     disk_contains_disk, disk_grid, disk_separation,
                     spherical_distance, spherical_distance_arr, to_xyz,
                     to_xyz_arr)
from .maps import ExpFamily, RationalMap, compose, orbit, parse_map
from .roots import poly_roots
from .branch import (ENCLOSURE_C, KOEBE_PAD, InverseBranch, koebe_distortion,
                     pull_back_univalent)
from .radial import (RadialCertificate, detect_radial, disk_of_univalence,
                     times_landing_in)
from .ifs import (PLANAR, SPHERICAL, AffineBranch, ConformalIFS,
                  DimensionEstimate, ifs_from_dict, ifs_to_dict,
                  limit_set_sample, mass_check, moran_solve, moran_sum,
                  pressure, pressure_root, word_log_derivs)
from .hyperdim import (BuildResult, CoveringSelection, HyperbolicSetReport,
                       box_counting, build_hyperbolic_ifs, five_r_cover,
                       repelling_periodic_points, two_branch_construction,
                       verify_hyperbolic)

__version__ = "0.1.0"
