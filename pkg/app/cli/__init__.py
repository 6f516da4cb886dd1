# command-line front end
