"""
Analysis prompt for one review of one film.
"""

from typing import Any, Dict, List, Optional

from ..models import MovieRecord, Review

MISSING = "N/A"

ROLE_DEFINITION = (
    "You are a professional film critic and sentiment analysis expert. "
    "Please analyze the following movie review and provide a detailed sentiment analysis."
)

ANALYSIS_REQUEST = """Analyze this review's sentiment and attitude. Return ONLY a JSON object with the following keys:
1. sentiment_score: Score from 1-10 (1=extremely negative, 10=extremely positive)
2. emotion_keywords: List of 5 keywords/phrases that best represent the emotional tone
3. primary_emotion: Main emotion expressed (e.g., admiration, disappointment, anger, surprise)
4. review_focus: What aspects the review focuses on (e.g., plot, acting, visuals, directing)
5. bias_analysis: Analysis of potential biases or subjective factors
6. summary: Brief summary (50 words or less)"""

OUTPUT_FORMAT = "Return ONLY the JSON result with no additional text or explanation."


def _money(value: Optional[float]) -> str:
    return MISSING if value is None else f"${value:,.0f}"


def _text(value: Any) -> str:
    if value is None:
        return MISSING
    text = str(value).strip()
    return text if text else MISSING


def _number(value: Optional[float]) -> str:
    if value is None:
        return MISSING
    return str(int(value)) if float(value).is_integer() else f"{value:g}"


def movie_information(movie: MovieRecord) -> List[str]:
    """Movie information block, one line per field, missing values as N/A."""
    roi = None
    if movie.opening_weekend is not None and movie.budget:
        roi = movie.opening_weekend / movie.budget
    rating = MISSING if movie.imdb_rating is None else f"{movie.imdb_rating:g}/10"
    return [
        f"- Title: {_text(movie.title)}",
        f"- Director: {_text(movie.director)}",
        f"- Writers: {_text(movie.writers)}",
        f"- Release Year: {_number(movie.release_year)}",
        f"- Release Month: {_number(movie.release_month)}",
        f"- Release Day: {_number(movie.release_day)}",
        f"- Budget: {_money(movie.budget)}",
        f"- Opening Weekend (US/Canada): {_money(movie.opening_weekend)}",
        f"- Worldwide Gross: {_money(movie.gross_worldwide)}",
        f"- ROI: {MISSING if roi is None else f'{roi:.2f}'}",
        f"- IMDb Rating: {rating}",
        f"- Language: {_text(movie.language)}",
        f"- Country of Origin: {_text(movie.country)}",
        f"- Filming Locations: {_text(movie.filming_locations)}",
        f"- Production Companies: {_text(movie.production_companies)}",
        f"- Runtime: {_number(movie.runtime)}",
    ]


def build_prompt(movie: MovieRecord, review: Review) -> str:
    """
    Render the four-part prompt: role, movie information, review text and
    analysis request, closed by the output-format instruction.
    """
    parts = [
        ROLE_DEFINITION,
        "MOVIE INFORMATION:\n" + "\n".join(movie_information(movie)),
        f'REVIEW TEXT: "{review.body}"',
        ANALYSIS_REQUEST,
        OUTPUT_FORMAT,
    ]
    return "\n\n".join(parts)


def build_messages(prompt: str) -> List[Dict[str, str]]:
    """Chat-completion message list for a rendered prompt."""
    return [{"role": "user", "content": prompt}]
