"""
Pluggable model clients: vision-language labelling, embeddings, captioning and chat.
"""
