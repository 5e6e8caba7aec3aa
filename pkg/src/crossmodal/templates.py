"""Frozen prompt templates.

These strings are part of the engine's contract: golden tests pin their
exact bytes, so any edit here must bump TEMPLATE_VERSION and regenerate
the goldens.
"""

TEMPLATE_VERSION = 1

# sent as a single user message; the raw query is appended after one space
TRANSLATE_TEMPLATE = (
    "Translate the following text to English, provide the result directly "
    "without explanations:"
)

# sent when the (translated) query still exceeds the token limit
SUMMARIZE_TEMPLATE = (
    "Summarize the following text in English in fewer than 60 words, "
    "provide the result directly without explanations:"
)

# system message for text-only conversations
SYSTEM_PLAIN = (
    "You are a helpful assistant. Answer in the language of the user's "
    "question."
)

# system message once any image descriptions are attached to the session
SYSTEM_GROUNDED = (
    "You are a helpful assistant. Answer in the language of the user's "
    "question. Pretend that you can see the user's uploaded images; each is "
    "given to you as a numbered description before the question. Answer "
    "questions about the images as if you were looking at them, and do not "
    "mention the images or their descriptions when the question is "
    "unrelated to them."
)


def translation_prompt(query: str) -> str:
    return f"{TRANSLATE_TEMPLATE} {query}"


def summarization_prompt(text: str) -> str:
    return f"{SUMMARIZE_TEMPLATE} {text}"


def description_block(descriptions: list[str]) -> str:
    return "\n".join(f"Image {n}: {text}" for n, text in enumerate(descriptions, 1))
