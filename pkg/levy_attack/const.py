"""Constant definitions for the Levy-Attack toolkit."""

DOMAIN = "levy_attack"

CONF_ALPHA = "alpha"
CONF_MAX_STEPS = "max_steps"
CONF_PSI = "psi"
CONF_DELTA = "initial_delta"
CONF_EPSILON = "initial_epsilon"
CONF_ADAPTATION_WINDOW = "adaptation_window"
CONF_ADAPTATION_FACTOR = "adaptation_factor"
CONF_PROBE_INTERVAL = "probe_interval"
CONF_MAX_INIT_ATTEMPTS = "max_init_attempts"
CONF_SEED = "seed"

CONF_SUBCOMMAND = "subcommand"
CONF_ALPHAS = "alphas"
CONF_SAMPLES = "samples"
CONF_MODEL = "model"
CONF_IMAGES = "dataset_images"
CONF_LABELS = "dataset_labels"
CONF_SYNTHETIC = "synthetic"
CONF_SCALE_01 = "scale_01"
CONF_OUT = "out"
CONF_CSV = "csv"
CONF_DUMP_DIR = "dump_dir"
CONF_THREADS = "threads"
CONF_INDEX = "index"
CONF_HIDDEN = "hidden"
CONF_EPOCHS = "epochs"
CONF_CLASSES = "classes"
CONF_N = "n"

SUBCOMMAND_TRAIN = "train"
SUBCOMMAND_ATTACK = "attack"
SUBCOMMAND_SWEEP = "sweep"
SUBCOMMAND_VALIDATE = "validate-sampler"
SUBCOMMANDS = [
    SUBCOMMAND_TRAIN,
    SUBCOMMAND_ATTACK,
    SUBCOMMAND_SWEEP,
    SUBCOMMAND_VALIDATE,
]

ENV_THREADS = "LEVY_ATTACK_THREADS"

DEFAULT_ALPHAS = (2.0, 1.5, 1.0, 0.5)
DEFAULT_MAX_STEPS = 5000
DEFAULT_PSI = 1e-7
DEFAULT_DELTA = 0.1
DEFAULT_EPSILON = 0.1
DEFAULT_ADAPTATION_WINDOW = 30
DEFAULT_ADAPTATION_FACTOR = 1.5
DEFAULT_PROBE_INTERVAL = 10
DEFAULT_MAX_INIT_ATTEMPTS = 1000
DEFAULT_SEED = 0
DEFAULT_SAMPLES = 1000
DEFAULT_EPOCHS = 200
DEFAULT_HIDDEN = 0
DEFAULT_LEARNING_RATE = 0.5
DEFAULT_HIDDEN_LEARNING_RATE = 0.1

# success-rate targets and clamps of the step-size adaptation
ORTHOGONAL_SUCCESS_TARGET = 0.5
SHRINK_SUCCESS_TARGET = 0.25
EPSILON_CEILING = 0.99
MAX_RESAMPLE_ATTEMPTS = 10

# synthetic blobs
DEFAULT_BLOB_SPREAD = 0.05
DEFAULT_SEPARATION = 6.0

# sampler validation
MIN_VALIDATION_SAMPLES = 1000
DEFAULT_VALIDATION_SAMPLES = 100_000
VALIDATION_CF_POINTS = (0.5, 1.0, 2.0)
CF_TOLERANCE = 0.02
KS_TOLERANCE = 0.01

# sparsity statistic counts coordinates above this share of the L-infinity norm
SPARSITY_RELATIVE_THRESHOLD = 0.01

MODEL_MAGIC = b"LVYM"
MODEL_VERSION = 1
ACTIVATION_IDENTITY = 0
ACTIVATION_RELU = 1
ACTIVATION_TAGS = {
    "identity": ACTIVATION_IDENTITY,
    "relu": ACTIVATION_RELU,
}

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
MNIST_NUM_CLASSES = 10
PIXEL_BOUNDS = (0.0, 255.0)
UNIT_BOUNDS = (0.0, 1.0)

PGM_MAXVAL = 255
PGM_MID_GRAY = 128

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# synthetic dataset used by --synthetic
SYNTHETIC_NUM_CLASSES = 2
SYNTHETIC_DIM = 50
SYNTHETIC_POINTS_PER_CLASS = 250
SYNTHETIC_DATA_SEED = 0
