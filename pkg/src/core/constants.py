"""Константы для ResNet ASR Lab.

Централизованное хранилище всех магических чисел и строк.
"""

# Аудио и признаки
SAMPLE_RATE = 8000
PCM16_SCALE = 32768.0
FRAME_LENGTH = 200  # 25 мс
HOP_LENGTH = 80  # 10 мс
N_FFT = 256
N_MELS = 40
N_FRAMES = 64
PRE_EMPHASIS = 0.97
F_MIN = 0.0
F_MAX = 4000.0
LOG_FLOOR = 1e-10
FEATURE_STD_FLOOR = 1e-5

# Классы: 0 = "zero", 1..9 = цифры, 10 = "oh"
CLASS_NAMES: tuple[str, ...] = (
    "zero",
    "one",
    "two",
    "three",
    "four",
    "five",
    "six",
    "seven",
    "eight",
    "nine",
    "oh",
)
NUM_CLASSES = len(CLASS_NAMES)
BINARY_CLASS_NAMES: tuple[str, ...] = ("clean", "noisy")

# Multi-condition режим
TRAIN_SNRS_DB: tuple[int, ...] = (20, 15, 10, 5)
TEST_ONLY_SNRS_DB: tuple[int, ...] = (-5,)
ALLOWED_SNRS_DB: frozenset[int] = frozenset((20, 15, 10, 5, -5))
SNR_TOLERANCE_DB = 0.1
DEFAULT_TEST_FRACTION = 0.40

# Синтетический корпус
TOKEN_MIN_SECONDS = 0.5
TOKEN_MAX_SECONDS = 0.8
FREQUENCY_JITTER = 0.02
NOISE_STREAM_SECONDS = 2.0
BABBLE_TALKERS = 24
REFERENCE_FILES_PER_MODE = 2412  # размер полного корпуса на режим

# Обучение
DEFAULT_LEARNING_RATE = 0.001
DEFAULT_FINE_TUNE_LEARNING_RATE = 0.0001
DEFAULT_BATCH_SIZE = 32
DEFAULT_EPOCHS = 30
DEFAULT_SEED = 0
DEFAULT_EVAL_BATCH_SIZE = 64
FEATURE_CACHE_MAX_ENTRIES = 8192  # ~10 КБ на матрицу 40 × 64

# Модель
DEFAULT_INPUT_SHAPE: tuple[int, int, int] = (1, N_MELS, N_FRAMES)
SOURCE_NUM_CLASSES = 1000
SOURCE_STAGE_BLOCKS: tuple[int, ...] = (3, 4, 6, 3)
SOURCE_STAGE_FILTERS: tuple[tuple[int, int, int], ...] = (
    (64, 64, 256),
    (128, 128, 512),
    (256, 256, 1024),
    (512, 512, 2048),
)
TARGET_BLOCK_FILTERS: tuple[int, ...] = (64, 128, 256)
STEM_FILTERS = 64
DENSE_UNITS = 128
DROPOUT_RATE = 0.5
OUTPUT_HEAD_PREFIX = "head"

# Тензорное ядро
BN_EPSILON = 1e-5
BN_MOMENTUM = 0.9
GRAD_CHECK_STEP = 1e-3
GRAD_CHECK_TOLERANCE = 1e-3
GRAD_CHECK_ABS_FLOOR = 1e-4

# Чекпоинты
CHECKPOINT_MAGIC = b"RNCK"
CHECKPOINT_VERSION = 1
DTYPE_FLOAT32 = 0
LATEST_POINTER = "latest"
CHECKPOINT_PATTERN = "epoch-{epoch:04d}.rnck"
FEATURE_MEAN_KEY = "features.mean"
FEATURE_STD_KEY = "features.std"

# Манифест и отчёты
MANIFEST_HEADER: tuple[str, ...] = ("path", "label", "mode", "noise_type", "snr_db")
METRICS_HEADER: tuple[str, ...] = ("mode", "noise_type", "snr_db", "count", "correct", "accuracy_pct")
HISTORY_HEADER: tuple[str, ...] = ("epoch", "loss", "val_accuracy")
COMPARISON_HEADER: tuple[str, ...] = ("run", "count", "accuracy_pct", "wer_pct", "clean_accuracy_pct", "noisy_accuracy_pct")
REPORT_JSON = "report.json"
LOCK_FILE = ".lock"

# Эталонная точность (clean, noisy) полного корпуса; на синтетике не воспроизводится
REFERENCE_ACCURACY: dict[str, tuple[float, float]] = {
    "ResNet before transfer": (94.54, 83.43),
    "ResNet after transfer": (98.94, 91.21),
    "CNN": (97.21, 90.12),
    "LSTM": (96.06, 86.12),
    "BiLSTM": (94.33, 83.43),
    "Concatenate LSTM-CNN": (97.96, 90.72),
}
