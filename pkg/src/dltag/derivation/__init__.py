from .chart import derive
from .inputs import (
    ClauseUnit,
    CueMark,
    DiscourseInput,
    InputError,
    Token,
    bundled_example,
    bundled_example_names,
    load_input,
    load_input_file,
    simple_input,
)
from .model import (
    Attachment,
    BoundExceeded,
    CueRealization,
    DerivationError,
    DerivationNode,
    DerivationStep,
    DerivationTree,
    IncompleteError,
    canonical,
    steps,
)
from .ops import adjoin, build_derived, fill_leaf, instantiate, linearize, realize_anchor, substitute
from .oracle import enumerate_all
