# Strong-observability informativity audit and attack toolkit
__version__ = '0.3.0'
