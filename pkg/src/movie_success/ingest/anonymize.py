"""
Keyed hashing of review authors.
"""

import hashlib
import hmac

from ..errors import ContractViolation

AUTHOR_PREFIX = "u_"
DIGEST_CHARS = 16


def anonymize_author(raw_author: str, salt: str) -> str:
    """
    Opaque, stable identifier for a review author.

    HMAC-SHA256 of the trimmed author name keyed by ``salt``; the same
    author and salt always give the same identifier, and the name cannot be
    recovered from it.

    Raises:
        ContractViolation: If ``salt`` is empty
    """
    if not salt:
        raise ContractViolation("anonymization salt must be nonempty")
    digest = hmac.new(salt.encode("utf-8"), (raw_author or "").strip().encode("utf-8"), hashlib.sha256)
    return AUTHOR_PREFIX + digest.hexdigest()[:DIGEST_CHARS]
