"""Exact and approximate dynamic time warping with a cDTW vs FastDTW benchmark suite."""
from .bench import AlgoSpec, CaseReport, CrossoverReport, read_report_csv, write_report_csv
from .cluster import Dendrogram, DistanceMatrix, distance_matrix, parse_newick, single_linkage, to_newick
from .core import DtwResult, band_cells, cdtw, euclidean_sq, full_dtw, local_cost
from .datagen import adversarial_pair, fall_pair, load_ucr, random_walk, write_ucr
from .errors import WarpError
from .fastdtw import SearchWindow, approx_error_pct, fastdtw, project_and_expand, reduce_by_half, windowed_dtw
from .nn import envelope, lb_keogh, nn_search, znorm

__version__ = "0.1.0"
