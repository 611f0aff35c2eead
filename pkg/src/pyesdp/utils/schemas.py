NETWORK_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1

NETWORK_KIND = "network"
MEASURED_KIND = "measured"

SENSOR_EDGE_PREFIX = "s"
ANCHOR_EDGE_PREFIX = "a"

METHODS = ("esdp", "pesdp")

RESULTS_COLUMNS = [
    "run_id",
    "method",
    "n",
    "m",
    "r",
    "sigma",
    "p",
    "net_seed",
    "noise_seed",
    "status",
    "objective",
    "dual_objective",
    "gap",
    "iterations",
    "formulation_time_s",
    "solve_time_s",
    "delta",
]

# Columns whose values depend on the machine clock
WALL_TIME_COLUMNS = ["formulation_time_s", "solve_time_s"]

SUMMARY_COLUMNS = [
    "method",
    "cell",
    "mean_PE",
    "std_PE",
    "mean_solve_time_s",
    "count",
]

PAIRS_COLUMNS = [
    "cell",
    "net_seed",
    "delta_esdp",
    "delta_pesdp",
    "delta_diff",
    "pesdp_not_worse",
    "status_esdp",
    "status_pesdp",
    "iterations_esdp",
    "iterations_pesdp",
]
