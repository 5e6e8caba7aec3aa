"""Cross-modal search and conversation engine.

Ranks images against text queries (and descriptions against image queries)
over precomputed global/local embedding representations, re-ranks external
web-search results, and grounds LLM conversations about images through
retrieved descriptions.  All neural models sit behind pluggable provider
contracts; the engine itself is pure numpy over memory-mapped tensor files.
"""

__version__ = "0.1.0"
