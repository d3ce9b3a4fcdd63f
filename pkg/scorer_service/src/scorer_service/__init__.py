"""HTTP microservice scoring multiple-choice candidates with a transformer.

Endpoints: ``POST /score`` takes ``{"evidence", "question", "candidates"}``
and returns ``{"scores": [...]}`` normalized across candidates;
``GET /health`` reports readiness and the loaded model id.
"""

from .app import create_app
from .config import ServiceConfig, config_from_env
from .fixture import build_fixture_model
from .model import CandidateScorer, OverBudgetError

__version__ = "0.1.0"
