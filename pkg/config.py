import os

from dotenv import load_dotenv


def init_env():
    load_dotenv(override=True)

def _default_threads() -> str:
    return str(min(os.cpu_count() or 1, 8))

def get_config():
    return {
        'LOG_LEVEL':              os.getenv('LOG_LEVEL', 'INFO'),
        'RR_THREADS':             int(os.getenv('RR_THREADS', _default_threads())),
        'RR_QUAD_TOL':            float(os.getenv('RR_QUAD_TOL', '1e-10')),
        'RR_CONDITION_TOL':       float(os.getenv('RR_CONDITION_TOL', '1e-9')),
        'RR_CHECK_X_NODES':       int(os.getenv('RR_CHECK_X_NODES', '257')),
        'RR_CHECK_V_SAMPLES':     int(os.getenv('RR_CHECK_V_SAMPLES', '129')),
        'RR_DEDUP_TOL':           float(os.getenv('RR_DEDUP_TOL', '1e-12')),
        'RR_MAX_DEPTH':           int(os.getenv('RR_MAX_DEPTH', '40')),
        'RR_U_SAMPLES':           int(os.getenv('RR_U_SAMPLES', '513')),
        'RR_SWEEP_RESOLUTION_X':  int(os.getenv('RR_SWEEP_RESOLUTION_X', '65')),
        'RR_SWEEP_RESOLUTION_V':  int(os.getenv('RR_SWEEP_RESOLUTION_V', '17')),
    }
