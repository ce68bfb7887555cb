// Implementation forthcoming; see the matching header once added.
