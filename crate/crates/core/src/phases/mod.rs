//! Protocol phases running on the engine.
