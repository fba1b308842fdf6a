import os

class Settings:
    def __init__(self):
        # Default master seed when --master-seed is not given
        self.MASTER_SEED = int(os.getenv("RDSWALK_MASTER_SEED", "20240101"))
        # Dense transition matrices / exact oracle are only built below this size
        self.DENSE_CAP = int(os.getenv("RDSWALK_DENSE_CAP", "5000"))
        self.OUTPUT_DIR = os.getenv("RDSWALK_OUTPUT_DIR", "./out")
        self.LOG_LEVEL = os.getenv("RDSWALK_LOG_LEVEL", "INFO").upper()

        self.REDIS_URL = os.getenv("REDIS_URL", "redis://redis:6379/0")
        self.CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", self.REDIS_URL)
        self.CELERY_RESULT_BACKEND = os.getenv("CELERY_RESULT_BACKEND", self.REDIS_URL)
        # "1" runs network blocks inline; "0" enqueues them on the celery worker
        self.EXPERIMENT_SYNC = os.getenv("EXPERIMENT_SYNC", "1") == "1"
        self.TASK_TIMEOUT = float(os.getenv("EXPERIMENT_TASK_TIMEOUT", "3600"))

settings = Settings()
MASTER_SEED = settings.MASTER_SEED
DENSE_CAP = settings.DENSE_CAP
REDIS_URL = settings.REDIS_URL
