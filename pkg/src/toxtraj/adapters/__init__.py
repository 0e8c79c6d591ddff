from .embedding import MockEmbedder, RemoteEmbedder, cosine, embed, unit
from .index import VectorIndex, retrieve_top_k
from .kg import FixtureKG, kg_neighbors
from .llm import FixtureRecorder, LlmCompletion, MockLLM, RemoteLLM, fixture_key, llm_call
from .search import EvidenceDoc, FixtureSearch, web_search
from .terms import TermTable, ner
