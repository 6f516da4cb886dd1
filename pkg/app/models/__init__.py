# System, dataset and model-set types
