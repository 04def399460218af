"""Discrete pseudospherical surfaces via the loop-group d'Alembert construction."""
from .birkhoff import SolverConfig, split_minus_plus, split_plus_minus
from .dalembert import build_frame, build_frame_field, extract_angle_field, extract_potentials
from .hirota import AxisData, direct_frame, evolve_u
from .lattice import AngleField, FrameField, Rect
from .loops import LaurentLoop, NormalizedLoop, ScalarLaurent
from .potentials import DressedPotential, PotentialPair, Table, normalized_potential
from .sym import build_mesh, export_obj, sym_point, validate_geometry

__version__ = "0.1.0"
