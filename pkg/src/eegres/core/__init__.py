"""Core domain logic: signals, features, graph pooling, SVM and evaluation."""
