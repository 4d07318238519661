from .config import HarnessConfig
from .corpus import build_corpus, load_corpus, make_record
from .evaluate import MetricReport, evaluate, evaluate_records
from .reward_run import reward_run

__all__ = ["HarnessConfig", "MetricReport", "build_corpus", "evaluate", "evaluate_records", "load_corpus",
           "make_record", "reward_run"]
