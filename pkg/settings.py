import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    TOL_REL = float(os.environ.get('INFOATTACK_TOL', '1e-9'))
    TOL_MODE = os.environ.get('INFOATTACK_TOL_MODE', 'relative')

    DEFAULT_SEED = int(os.environ.get('INFOATTACK_SEED', '42'))
    DEFAULT_HORIZON = int(os.environ.get('INFOATTACK_HORIZON', '100'))

    DIRECTION_RETRIES = int(os.environ.get('INFOATTACK_DIRECTION_RETRIES', '64'))
    DIRECTION_MARGIN_FACTOR = 100.0

    MINNORM_MAX_ITER = int(os.environ.get('INFOATTACK_MINNORM_MAX_ITER', '200'))
    MINNORM_REL_DECREASE = 1e-10
    MINNORM_GRID_POINTS = 16

    GRID_STEP = float(os.environ.get('INFOATTACK_GRID_STEP', '0.05'))
    GRID_REFINE_ROUNDS = 2
    GRID_REFINE_FACTOR = 10
    MODEL_SET_SAMPLES = int(os.environ.get('INFOATTACK_MODEL_SET_SAMPLES', '32'))

    LOG_LEVEL = os.environ.get('LOG_LEVEL', 'INFO').upper()
    LOG_TO_STDOUT = os.environ.get('LOG_TO_STDOUT', 'False').lower() == 'true'
