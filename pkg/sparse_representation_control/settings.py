# Shared constants of the experiment protocol.
# Everything here can be overridden through the experiment config;
# the values are the defaults of the desk-scale protocol.

# Episodes are cut off after this many steps (timeout, not termination)
EPISODE_CUT_OFF = 1000

# Network architecture [input, first hidden, representation]
HIDDEN_SIZES = (32, 256)
REPRESENTATION_WIDTH = 256

MINI_BATCH_SIZE = 64
DEFAULT_EPOCHS = 50
DEFAULT_EPOCHS_ACROBOT = 100
DEFAULT_DATASET_SIZE = 50_000

# Units count as active above this threshold (sigmoids never reach zero)
ACTIVE_THRESHOLD_RELU = 0.0
ACTIVE_THRESHOLD_SIGMOID = 0.01

EMA_SMOOTHING = 0.1

# Sweep grids of the representation and control hyperparameters
GRID_KL_STRENGTH = (0.1, 0.01, 0.001)
GRID_BETA = (0.05, 0.1, 0.2)
GRID_NN_STRENGTH = (0.1, 0.01, 0.001, 0.0001)
GRID_DROPOUT = (0.1, 0.2, 0.3, 0.4, 0.5)
GRID_KSPARSE_K = (16, 32, 64, 128)
GRID_WTA_PERCENT = (6.25, 12.5, 25.0, 50.0)
GRID_STEP_SIZE = (0.1, 0.04, 0.01, 0.004, 0.001, 0.0004, 0.0001)

# Tile coding
GRID_TILE_SIZES = (4, 8, 16)
GRID_TILINGS = (8, 16, 32)
TILE_HASH_SIZE = 8192

# Test-set sizes of the value oracle (full-scale protocol)
N_TEST_STATES = 5000
N_TEST_STATES_CATCHER = 1000
N_ROLLOUTS_DESK = 10_000
N_ROLLOUTS_FULL = 100_000

# Rollouts per probe of the reference values of the tracked action values
N_PROBE_ROLLOUTS_DESK = 100
N_PROBE_ROLLOUTS_FULL = 10_000
