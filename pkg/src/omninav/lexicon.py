"""Built-in noun-phrase lexicon for rule-based keyword extraction.

Covers the common indoor objects, rooms and fixtures that navigation
instructions mention, so the engine runs with no external language model.
The twelve frequent object categories used by the restricted ablation modes
are listed separately.
"""

from __future__ import annotations

# The twelve most frequent object categories, descending by instance count.
COMMON_CATEGORIES: tuple[str, ...] = (
    "chair",
    "table",
    "cushion",
    "cabinet",
    "shelving",
    "sink",
    "dresser",
    "plant",
    "bed",
    "sofa",
    "counter",
    "fireplace",
)

DEFAULT_LEXICON: tuple[str, ...] = COMMON_CATEGORIES + (
    # tables and seating
    "dining table",
    "coffee table",
    "side table",
    "bedside table",
    "end table",
    "console table",
    "round table",
    "wooden table",
    "glass table",
    "pool table",
    "desk",
    "office chair",
    "armchair",
    "rocking chair",
    "dining chair",
    "high chair",
    "stool",
    "bar stool",
    "bench",
    "couch",
    "leather sofa",
    "loveseat",
    "ottoman",
    "futon",
    "recliner",
    # beds and bedroom
    "double bed",
    "king bed",
    "bunk bed",
    "crib",
    "mattress",
    "headboard",
    "nightstand",
    "wardrobe",
    "closet",
    "walk in closet",
    "chest of drawers",
    "vanity",
    "mirror",
    "full length mirror",
    # kitchen
    "kitchen",
    "kitchen counter",
    "marble kitchen counter",
    "kitchen island",
    "kitchen table",
    "counter with the blue top",
    "countertop",
    "stove",
    "oven",
    "microwave",
    "refrigerator",
    "fridge",
    "freezer",
    "dishwasher",
    "kitchen sink",
    "bar",
    "pantry",
    "toaster",
    "kettle",
    "coffee machine",
    "range hood",
    # bathroom
    "bathroom",
    "bathroom sink",
    "bathtub",
    "tub",
    "shower",
    "shower door",
    "toilet",
    "towel rack",
    "towel",
    "washing machine",
    "dryer",
    "laundry room",
    "laundry basket",
    # rooms and areas
    "living room",
    "dining room",
    "bedroom",
    "master bedroom",
    "guest room",
    "family room",
    "office",
    "study",
    "library",
    "hallway",
    "hall",
    "corridor",
    "entryway",
    "foyer",
    "lobby",
    "garage",
    "basement",
    "attic",
    "balcony",
    "patio",
    "porch",
    "deck",
    "terrace",
    "garden",
    "yard",
    "lounge",
    "gym",
    "exercise room",
    "game room",
    "theater room",
    "sunroom",
    "nursery",
    "closet door",
    # passages and architecture
    "door",
    "doorway",
    "double doors",
    "glass door",
    "front door",
    "back door",
    "sliding door",
    "french doors",
    "archway",
    "arch",
    "stairs",
    "staircase",
    "stairway",
    "steps",
    "top of the stairs",
    "bottom of the stairs",
    "landing",
    "railing",
    "banister",
    "handrail",
    "elevator",
    "window",
    "bay window",
    "window sill",
    "wall",
    "ceiling",
    "floor",
    "column",
    "pillar",
    "ledge",
    "alcove",
    "threshold",
    # storage and shelves
    "bookshelf",
    "bookcase",
    "shelf",
    "shelving unit",
    "display case",
    "china cabinet",
    "filing cabinet",
    "drawer",
    "cupboard",
    "locker",
    "rack",
    "coat rack",
    "wine rack",
    # decor and fixtures
    "lamp",
    "floor lamp",
    "table lamp",
    "chandelier",
    "ceiling fan",
    "light fixture",
    "sconce",
    "candle",
    "picture",
    "picture frame",
    "painting",
    "portrait",
    "poster",
    "artwork",
    "sculpture",
    "statue",
    "vase",
    "flower pot",
    "potted plant",
    "house plant",
    "flowers",
    "rug",
    "carpet",
    "doormat",
    "mat",
    "curtains",
    "drapes",
    "blinds",
    "clock",
    "grandfather clock",
    "fish tank",
    "aquarium",
    "fireplace mantel",
    "mantel",
    "bin",
    "trash can",
    "basket",
    "box",
    "chest",
    "trunk",
    "suitcase",
    "umbrella stand",
    # electronics
    "television",
    "tv",
    "tv stand",
    "computer",
    "monitor",
    "laptop",
    "printer",
    "speaker",
    "piano",
    "grand piano",
    "guitar",
    "radiator",
    "heater",
    "air conditioner",
    "thermostat",
    "light switch",
    "telephone",
    # misc objects
    "pillow",
    "blanket",
    "books",
    "book",
    "magazine",
    "newspaper",
    "bowl",
    "plate",
    "cup",
    "bottle",
    "glass",
    "tray",
    "fruit bowl",
    "wine glasses",
    "pot",
    "pan",
    "cutting board",
    "knife block",
    "ironing board",
    "treadmill",
    "exercise bike",
    "weights",
    "ball",
    "toy",
    "dog bed",
    "cat tree",
    "water fountain",
    "fountain",
    "pool",
    "hot tub",
    "grill",
    "fire pit",
    "mailbox",
    "fence",
    "gate",
    "driveway",
    "car",
    "bicycle",
)
